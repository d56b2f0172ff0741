#pragma once

#include <string>

#include "accentkit/prosody.hpp"

namespace accentkit {

// Praat long-form TextGrid, reading the interval tier with the given name.
// Labels "sil", "sp" and "" are silence; anything else must parse as an
// ARPAbet phoneme.
PhoneIntervals parse_textgrid(const std::string& content,
                              const std::string& tier = "phones");
PhoneIntervals read_textgrid(const std::string& path,
                             const std::string& tier = "phones");

// Plain 3-column alternative: phoneme<TAB>start_sec<TAB>end_sec, one
// interval per line, '#' comments allowed.
PhoneIntervals parse_interval_columns(const std::string& content);
PhoneIntervals read_interval_columns(const std::string& path);

// Dispatch on extension: .TextGrid/.textgrid vs anything else.
PhoneIntervals read_alignment(const std::string& path);

}  // namespace accentkit
