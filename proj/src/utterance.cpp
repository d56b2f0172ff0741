#include "accentkit/utterance.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
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

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

int parse_int(const std::string& tok, const char* field) {
    if (tok.empty()) throw SyntaxError(std::string("empty value in ") + field);
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end != tok.c_str() + tok.size()) {
        throw SyntaxError("malformed integer '" + tok + "' in " + field);
    }
    return static_cast<int>(v);
}

double parse_double(const std::string& tok, const char* field) {
    if (tok.empty()) throw SyntaxError(std::string("empty value in ") + field);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || std::isnan(v)) {
        throw SyntaxError("malformed number '" + tok + "' in " + field);
    }
    return v;
}

std::vector<std::string> split_values(const std::string& body) {
    std::vector<std::string> out;
    for (auto& v : split(body, ',')) out.push_back(trim(v));
    return out;
}

}  // namespace

void AlignedUtterance::validate() const {
    const size_t n = phonemes.size();
    if (durations.size() != n || pitch.size() != n || energy.size() != n) {
        throw AlignmentError(
            "phoneme/duration/pitch/energy lengths disagree: " +
            std::to_string(n) + "/" + std::to_string(durations.size()) + "/" +
            std::to_string(pitch.size()) + "/" + std::to_string(energy.size()));
    }
    for (size_t i = 0; i < n; ++i) {
        if (durations[i] < 1) {
            throw InvariantViolation("duration " + std::to_string(durations[i]) +
                                     " at position " + std::to_string(i) +
                                     " is below the 1-frame minimum");
        }
    }
    if (!word_lengths.empty()) {
        long sum = 0;
        for (int w : word_lengths) {
            if (w < 1) throw InvariantViolation("word length below 1");
            sum += w;
        }
        if (sum != static_cast<long>(n)) {
            throw InvariantViolation("word lengths sum to " + std::to_string(sum) +
                                     " but the sequence has " + std::to_string(n) +
                                     " phonemes");
        }
    }
}

bool approx_equal(const AlignedUtterance& a, const AlignedUtterance& b, double tol) {
    if (a.phonemes != b.phonemes || a.durations != b.durations ||
        a.word_lengths != b.word_lengths) {
        return false;
    }
    for (size_t i = 0; i < a.pitch.size(); ++i) {
        if (std::fabs(a.pitch[i] - b.pitch[i]) > tol) return false;
        if (std::fabs(a.energy[i] - b.energy[i]) > tol) return false;
    }
    return true;
}

std::string format_number(double v, NumberStyle style) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') {
        s.erase(0, 1);  // values that round to zero lose the sign
    }
    if (style == NumberStyle::compact) {
        size_t last = s.find_last_not_of('0');
        if (s[last] == '.') ++last;  // keep one fractional digit
        s.erase(last + 1);
    }
    return s;
}

AlignedUtterance parse_sequence(const std::string& line) {
    auto parts = split(line, '|');
    if (parts.empty() || trim(parts[0]).empty()) {
        throw SyntaxError("line has no phoneme field");
    }

    AlignedUtterance u;
    u.phonemes = validate_inventory(split_ws(trim(parts[0])));

    bool have_d = false, have_p = false, have_e = false;
    std::vector<std::string> d_toks, p_toks, e_toks;
    for (size_t i = 1; i < parts.size(); ++i) {
        std::string field = trim(parts[i]);
        if (field.size() < 2 || field[1] != ':') {
            throw SyntaxError("malformed field '" + field + "'");
        }
        std::string body = field.substr(2);
        switch (field[0]) {
            case 'd':
                if (have_d) throw SyntaxError("duplicate d: field");
                d_toks = split_values(body);
                have_d = true;
                break;
            case 'p':
                if (have_p) throw SyntaxError("duplicate p: field");
                p_toks = split_values(body);
                have_p = true;
                break;
            case 'e':
                if (have_e) throw SyntaxError("duplicate e: field");
                e_toks = split_values(body);
                have_e = true;
                break;
            case 'w':
                if (u.has_word_lengths()) throw SyntaxError("duplicate w: field");
                for (auto& t : split_values(body)) {
                    u.word_lengths.push_back(parse_int(t, "w:"));
                }
                break;
            default:
                throw SyntaxError("unknown field '" + field + "'");
        }
    }
    if (!have_d || !have_p || !have_e) {
        throw SyntaxError("missing d:/p:/e: field");
    }

    // Reject length mismatches before looking at values, so a short d vector
    // with a malformed tail still reports AlignmentError.
    const size_t n = u.phonemes.size();
    if (d_toks.size() != n || p_toks.size() != n || e_toks.size() != n) {
        throw AlignmentError("field lengths " + std::to_string(d_toks.size()) +
                             "/" + std::to_string(p_toks.size()) + "/" +
                             std::to_string(e_toks.size()) + " do not match " +
                             std::to_string(n) + " phonemes");
    }

    for (auto& t : d_toks) u.durations.push_back(parse_int(t, "d:"));
    for (auto& t : p_toks) u.pitch.push_back(parse_double(t, "p:"));
    for (auto& t : e_toks) u.energy.push_back(parse_double(t, "e:"));

    u.validate();
    return u;
}

std::string serialize_sequence(const AlignedUtterance& u, NumberStyle style) {
    u.validate();
    if (u.size() == 0) throw InvariantViolation("cannot serialize an empty utterance");

    std::string out;
    for (size_t i = 0; i < u.phonemes.size(); ++i) {
        if (i) out += ' ';
        out += u.phonemes[i].text();
    }
    out += " | d:";
    for (size_t i = 0; i < u.durations.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(u.durations[i]);
    }
    out += " | p:";
    for (size_t i = 0; i < u.pitch.size(); ++i) {
        if (i) out += ',';
        out += format_number(u.pitch[i], style);
    }
    out += " | e:";
    for (size_t i = 0; i < u.energy.size(); ++i) {
        if (i) out += ',';
        out += format_number(u.energy[i], style);
    }
    if (u.has_word_lengths()) {
        out += " | w:";
        for (size_t i = 0; i < u.word_lengths.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(u.word_lengths[i]);
        }
    }
    return out;
}

std::vector<AlignedUtterance> read_utterance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    std::vector<AlignedUtterance> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        try {
            out.push_back(parse_sequence(t));
        } catch (const Error& e) {
            throw SyntaxError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void write_utterance_file(const std::string& path,
                          const std::vector<AlignedUtterance>& utts,
                          const std::vector<std::string>& comments) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path);
    for (size_t i = 0; i < utts.size(); ++i) {
        if (i < comments.size() && !comments[i].empty()) {
            out << "# " << comments[i] << "\n";
        }
        out << serialize_sequence(utts[i]) << "\n";
    }
}

}  // namespace accentkit
