// Parser and canonical serializer for the key = {value,...} listing format.
//
// Grammar (whitespace and line breaks insignificant):
//   listing   := entry (',' entry)* ','?
//   entry     := key '=' '{' body '}'
//   body      := token | condition (','|';' condition)*
//   condition := attribute '=' (value | '[' value (',' value)* ']')
// Keys and attribute names are case-insensitive; values are exact-case.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nest/norm.hpp"

namespace nest {

enum class ParseErrorKind {
    MissingKey,
    DuplicateKey,
    UnknownAttribute,
    UnknownValue,
    SyntaxError,
};

inline std::string_view to_string(ParseErrorKind k) {
    switch (k) {
    case ParseErrorKind::MissingKey:       return "MissingKey";
    case ParseErrorKind::DuplicateKey:     return "DuplicateKey";
    case ParseErrorKind::UnknownAttribute: return "UnknownAttribute";
    case ParseErrorKind::UnknownValue:     return "UnknownValue";
    case ParseErrorKind::SyntaxError:      return "SyntaxError";
    }
    return "";
}

struct ParseError : std::runtime_error {
    ParseError(ParseErrorKind k, std::string tok, std::size_t off)
        : std::runtime_error(std::string(to_string(k)) + ": '" + tok + "' at offset " +
                             std::to_string(off)),
          kind(k), token(std::move(tok)), offset(off) {}
    ParseErrorKind kind;
    std::string token;
    std::size_t offset;
};

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string normalize_key(std::string_view raw) {
    // Lowercase and collapse internal whitespace: "Norm  Type" -> "norm type".
    std::string out;
    bool pending_space = false;
    for (char ch : raw) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    return out;
}

struct Entry {
    std::string key;
    std::string body;
    std::size_t key_offset = 0;
    std::size_t body_offset = 0;
};

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    std::size_t pos() const { return pos_; }
    void advance() { ++pos_; }

    std::string_view slice(std::size_t from, std::size_t to) const {
        return text_.substr(from, to - from);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

inline std::vector<Entry> split_entries(std::string_view text) {
    Cursor cur(text);
    cur.skip_ws();
    if (cur.eof())
        throw ParseError(ParseErrorKind::SyntaxError, "", 0);

    std::vector<Entry> entries;
    while (!cur.eof()) {
        Entry e;
        e.key_offset = cur.pos();
        std::size_t key_end = cur.pos();
        while (!cur.eof() && cur.peek() != '=' && cur.peek() != '{') {
            if (!std::isspace(static_cast<unsigned char>(cur.peek()))) key_end = cur.pos() + 1;
            cur.advance();
        }
        if (cur.eof() || cur.peek() != '=')
            throw ParseError(ParseErrorKind::SyntaxError,
                             std::string(cur.slice(e.key_offset, key_end)), e.key_offset);
        e.key = normalize_key(cur.slice(e.key_offset, key_end));
        if (e.key.empty())
            throw ParseError(ParseErrorKind::SyntaxError, "=", cur.pos());
        cur.advance(); // '='
        cur.skip_ws();
        if (cur.eof() || cur.peek() != '{')
            throw ParseError(ParseErrorKind::SyntaxError, e.key, cur.pos());
        cur.advance(); // '{'
        e.body_offset = cur.pos();
        std::size_t body_start = cur.pos();
        while (!cur.eof() && cur.peek() != '}') cur.advance();
        if (cur.eof())
            throw ParseError(ParseErrorKind::SyntaxError, "{", body_start - 1);
        e.body = std::string(cur.slice(body_start, cur.pos()));
        cur.advance(); // '}'
        entries.push_back(std::move(e));
        cur.skip_ws();
        if (!cur.eof() && cur.peek() == ',') {
            cur.advance();
            cur.skip_ws();
        }
    }
    return entries;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Parses a condition-set body such as "obs_health=[MILD, CRITICAL], loc=CAFE".
// Conditions may be separated by ',' or ';'.
inline std::vector<Condition> parse_conditions(const std::string& body, std::size_t base_off) {
    std::vector<Condition> conds;
    std::size_t i = 0;
    const auto skip = [&] {
        while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    };
    skip();
    if (i >= body.size())
        throw ParseError(ParseErrorKind::SyntaxError, "", base_off + i);
    while (i < body.size()) {
        std::size_t attr_start = i;
        while (i < body.size() && body[i] != '=') ++i;
        if (i >= body.size())
            throw ParseError(ParseErrorKind::SyntaxError, trim(body.substr(attr_start)),
                             base_off + attr_start);
        std::string attr_tok = trim(body.substr(attr_start, i - attr_start));
        ++i; // '='

        Attr attr;
        const std::string attr_lc = lower(attr_tok);
        if (attr_lc == "obs_health") attr = Attr::ObsHealth;
        else if (attr_lc == "actual_health") attr = Attr::ActualHealth;
        else if (attr_lc == "loc") attr = Attr::Loc;
        else if (attr_lc == "vaccinated") attr = Attr::Vaccinated;
        else
            throw ParseError(ParseErrorKind::UnknownAttribute, attr_tok, base_off + attr_start);

        for (const Condition& c : conds)
            if (c.attr == attr)
                throw ParseError(ParseErrorKind::DuplicateKey, attr_tok, base_off + attr_start);

        Condition cond{attr, 0};
        skip();
        const bool bracketed = i < body.size() && body[i] == '[';
        if (bracketed) ++i;
        while (true) {
            skip();
            std::size_t val_start = i;
            while (i < body.size() && body[i] != ',' && body[i] != ';' && body[i] != ']')
                ++i;
            std::string val_tok = trim(body.substr(val_start, i - val_start));
            if (val_tok.empty())
                throw ParseError(ParseErrorKind::SyntaxError, "", base_off + val_start);
            std::optional<int> idx = attr_value_index(attr, val_tok);
            if (!idx)
                throw ParseError(ParseErrorKind::UnknownValue, val_tok, base_off + val_start);
            cond.allowed |= static_cast<std::uint8_t>(1u << *idx);
            if (!bracketed) break;
            if (i < body.size() && body[i] == ']') break;
            if (i >= body.size())
                throw ParseError(ParseErrorKind::SyntaxError, "[", base_off + val_start);
            ++i; // ',' between listed values
        }
        if (bracketed) {
            if (i >= body.size() || body[i] != ']')
                throw ParseError(ParseErrorKind::SyntaxError, "]", base_off + i);
            ++i;
        }
        conds.push_back(cond);
        skip();
        if (i < body.size()) {
            if (body[i] != ',' && body[i] != ';')
                throw ParseError(ParseErrorKind::SyntaxError, std::string(1, body[i]),
                                 base_off + i);
            ++i;
            skip();
        }
    }
    std::sort(conds.begin(), conds.end(),
              [](const Condition& a, const Condition& b) { return a.attr < b.attr; });
    return conds;
}

inline std::map<std::string, Entry> index_entries(std::string_view text,
                                                  const std::vector<std::string>& required) {
    std::map<std::string, Entry> by_key;
    for (Entry& e : split_entries(text)) {
        auto [it, inserted] = by_key.emplace(e.key, e);
        if (!inserted)
            throw ParseError(ParseErrorKind::DuplicateKey, e.key, e.key_offset);
    }
    for (const std::string& key : required)
        if (!by_key.count(key))
            throw ParseError(ParseErrorKind::MissingKey, key, text.size());
    return by_key;
}

} // namespace detail

inline Norm parse_norm(std::string_view text) {
    auto entries = detail::index_entries(
        text, {"norm type", "subject", "object", "antecedent", "consequent"});
    Norm norm;

    const detail::Entry& type_e = entries.at("norm type");
    const std::string type_tok = detail::trim(type_e.body);
    if (type_tok == "Prohibition") norm.norm_type = NormType::Prohibition;
    else if (type_tok == "Commitment") norm.norm_type = NormType::Commitment;
    else throw ParseError(ParseErrorKind::UnknownValue, type_tok, type_e.body_offset);

    norm.subject = detail::trim(entries.at("subject").body);
    norm.object = detail::trim(entries.at("object").body);
    if (norm.subject.empty())
        throw ParseError(ParseErrorKind::SyntaxError, "subject",
                         entries.at("subject").body_offset);
    if (norm.object.empty())
        throw ParseError(ParseErrorKind::SyntaxError, "object",
                         entries.at("object").body_offset);

    const detail::Entry& ante = entries.at("antecedent");
    const detail::Entry& cons = entries.at("consequent");
    norm.antecedent = detail::parse_conditions(ante.body, ante.body_offset);
    norm.consequent = detail::parse_conditions(cons.body, cons.body_offset);
    return norm;
}

inline NormativeInfo parse_normative_info(std::string_view text) {
    auto entries = detail::index_entries(
        text, {"sender", "receiver", "info type", "antecedent", "consequent"});
    NormativeInfo info;

    info.sender = detail::trim(entries.at("sender").body);
    info.receiver = detail::trim(entries.at("receiver").body);
    if (info.sender == info.receiver)
        throw ParseError(ParseErrorKind::SyntaxError, info.receiver,
                         entries.at("receiver").body_offset);

    const detail::Entry& type_e = entries.at("info type");
    const std::string type_tok = detail::trim(type_e.body);
    if (type_tok == "MESSAGE") info.info_type = InfoType::Message;
    else if (type_tok == "HINT") info.info_type = InfoType::Hint;
    else throw ParseError(ParseErrorKind::UnknownValue, type_tok, type_e.body_offset);

    const detail::Entry& ante = entries.at("antecedent");
    info.antecedent = detail::parse_conditions(ante.body, ante.body_offset);

    const detail::Entry& cons = entries.at("consequent");
    const std::string cons_tok = detail::trim(cons.body);
    if (cons_tok == "PUNISHMENT") info.consequent = InfoConsequent::Punishment;
    else if (cons_tok == "REWARD") info.consequent = InfoConsequent::Reward;
    else throw ParseError(ParseErrorKind::UnknownValue, cons_tok, cons.body_offset);

    return info;
}

namespace detail {

inline std::string format_conditions(const std::vector<Condition>& conds) {
    std::ostringstream os;
    bool first_cond = true;
    for (const Condition& c : conds) {
        if (!first_cond) os << "; ";
        first_cond = false;
        os << attr_name(c.attr) << "=[";
        bool first_val = true;
        for (int i = 0; i < attr_domain_size(c.attr); ++i) {
            if (!c.admits(i)) continue;
            if (!first_val) os << ", ";
            first_val = false;
            os << attr_value_name(c.attr, i);
        }
        os << "]";
    }
    return os.str();
}

} // namespace detail

inline std::string serialize_norm(const Norm& norm) {
    std::ostringstream os;
    os << "norm type   = {"
       << (norm.norm_type == NormType::Prohibition ? "Prohibition" : "Commitment") << "},\n"
       << "subject     = {" << norm.subject << "},\n"
       << "object      = {" << norm.object << "},\n"
       << "antecedent  = {" << detail::format_conditions(norm.antecedent) << "},\n"
       << "consequent  = {" << detail::format_conditions(norm.consequent) << "}\n";
    return os.str();
}

inline std::string serialize_normative_info(const NormativeInfo& info) {
    std::ostringstream os;
    os << "sender     = {" << info.sender << "},\n"
       << "receiver   = {" << info.receiver << "},\n"
       << "info type  = {" << (info.info_type == InfoType::Message ? "MESSAGE" : "HINT")
       << "},\n"
       << "antecedent = {" << detail::format_conditions(info.antecedent) << "},\n"
       << "consequent = {"
       << (info.consequent == InfoConsequent::Punishment ? "PUNISHMENT" : "REWARD") << "}\n";
    return os.str();
}

// Norm files hold one listing per block, blocks separated by blank lines.
inline std::vector<Norm> parse_norm_file(std::string_view text) {
    std::vector<Norm> norms;
    std::size_t pos = 0;
    while (pos < text.size()) {
        // A blank line (two consecutive newlines, ignoring spaces) ends a block.
        std::size_t block_end = pos;
        std::size_t scan = pos;
        int newlines = 0;
        while (scan < text.size()) {
            char ch = text[scan];
            if (ch == '\n') {
                ++newlines;
                if (newlines >= 2) break;
            } else if (!std::isspace(static_cast<unsigned char>(ch))) {
                newlines = 0;
                block_end = scan + 1;
            }
            ++scan;
        }
        std::string_view block = text.substr(pos, block_end - pos);
        if (!detail::trim(block).empty()) norms.push_back(parse_norm(block));
        pos = (scan >= text.size()) ? text.size() : scan + 1;
    }
    return norms;
}

// The initial top-down prohibition: infected agents must not stay in public.
inline const Norm& builtin_prohibition() {
    static const Norm norm = parse_norm(
        "norm type   = {Prohibition},\n"
        "subject     = {Infected_Agent},\n"
        "object      = {Healthy_Agent},\n"
        "antecedent  = {obs_health=[MILD, CRITICAL]},\n"
        "consequent  = {loc=[PARK, CAFE, CLINIC]}");
    return norm;
}

// Self-isolation commitment; used for emergence detection only.
inline const Norm& builtin_isolation_commitment() {
    static const Norm norm = parse_norm(
        "norm type   = {Commitment},\n"
        "subject     = {Infected_Agent},\n"
        "object      = {Healthy_Agent},\n"
        "antecedent  = {actual_health=[MILD, CRITICAL]},\n"
        "consequent  = {loc=[HOME]}");
    return norm;
}

inline std::vector<Norm> builtin_norms() {
    return {builtin_prohibition(), builtin_isolation_commitment()};
}

} // namespace nest
