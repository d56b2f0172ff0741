#include "accentkit/textgrid.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace accentkit {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Praat quotes strings and doubles embedded quotes.
std::string unquote(std::string s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
        out += s[i];
        if (s[i] == '"' && i + 1 < s.size() && s[i + 1] == '"') ++i;
    }
    return out;
}

bool is_silence_label(const std::string& label) {
    return label.empty() || label == "sil" || label == "sp";
}

PhoneInterval make_interval(const std::string& label, double start, double end) {
    PhoneInterval iv;
    iv.label = label;
    iv.start_sec = start;
    iv.end_sec = end;
    if (!is_silence_label(label)) iv.phoneme = parse_phoneme(label);
    return iv;
}

std::string read_all(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

PhoneIntervals parse_textgrid(const std::string& content, const std::string& tier) {
    std::istringstream in(content);
    std::string line;
    bool in_tier = false;
    bool interval_open = false;
    bool tier_found = false;
    double xmin = 0.0, xmax = 0.0;
    bool have_min = false, have_max = false;
    PhoneIntervals out;

    auto starts_with = [](const std::string& s, const char* pfx) {
        return s.rfind(pfx, 0) == 0;
    };
    auto value_after_eq = [](const std::string& s) {
        const size_t eq = s.find('=');
        return s.substr(eq + 1);
    };

    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (starts_with(t, "name")) {
            in_tier = unquote(value_after_eq(t)) == tier;
            tier_found = tier_found || in_tier;
            interval_open = false;
            continue;
        }
        if (!in_tier) continue;
        if (starts_with(t, "intervals [")) {
            interval_open = true;
            have_min = have_max = false;
            continue;
        }
        if (!interval_open) continue;  // skip the tier-level xmin/xmax/size
        if (starts_with(t, "xmin")) {
            xmin = std::stod(value_after_eq(t));
            have_min = true;
        } else if (starts_with(t, "xmax")) {
            xmax = std::stod(value_after_eq(t));
            have_max = true;
        } else if (starts_with(t, "text")) {
            if (!have_min || !have_max) {
                throw SyntaxError("TextGrid interval with text before xmin/xmax");
            }
            out.push_back(make_interval(unquote(value_after_eq(t)), xmin, xmax));
            interval_open = false;
        }
    }
    if (!tier_found) {
        throw SyntaxError("TextGrid has no interval tier named \"" + tier + "\"");
    }
    validate_intervals(out);
    return out;
}

PhoneIntervals read_textgrid(const std::string& path, const std::string& tier) {
    return parse_textgrid(read_all(path), tier);
}

PhoneIntervals parse_interval_columns(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    PhoneIntervals out;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ls(t);
        std::string label;
        double start, end;
        if (!(ls >> label >> start >> end)) {
            throw SyntaxError("alignment line " + std::to_string(lineno) +
                              ": expected phoneme start end");
        }
        out.push_back(make_interval(label, start, end));
    }
    validate_intervals(out);
    return out;
}

PhoneIntervals read_interval_columns(const std::string& path) {
    return parse_interval_columns(read_all(path));
}

PhoneIntervals read_alignment(const std::string& path) {
    const size_t dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));
    if (ext == "textgrid") return read_textgrid(path);
    return read_interval_columns(path);
}

}  // namespace accentkit
