#include "coordsketch/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace coordsketch {

namespace {

std::string format_plain(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string token;
    while (in >> token) {
        if (token.front() == '#') break;
        tokens.push_back(std::move(token));
    }
    return tokens;
}

std::uint64_t parse_id(const std::string& token) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(token.c_str(), &end, 10);
    if (end != token.c_str() + token.size()) {
        throw std::invalid_argument("bad key id: " + token);
    }
    return v;
}

AttrsPtr parse_attrs(const std::vector<std::string>& tokens, std::size_t first) {
    if (first >= tokens.size()) return nullptr;
    Attrs attrs;
    for (std::size_t i = first; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("bad attribute token (want name=value): " + tokens[i]);
        }
        attrs.emplace_back(tokens[i].substr(0, eq), tokens[i].substr(eq + 1));
    }
    return std::make_shared<const Attrs>(std::move(attrs));
}

void write_attrs(std::ostream& out, const AttrsPtr& attrs) {
    if (!attrs) return;
    for (const auto& [name, value] : *attrs) out << ' ' << name << '=' << value;
}

}  // namespace

std::string format_hex(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", value);
    return buf;
}

double parse_double(const std::string& token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
        throw std::invalid_argument("bad numeric token: " + token);
    }
    return v;
}

void write_collection(std::ostream& out, const WeightedSetCollection& collection) {
    for (const Key& key : collection.ground()) {
        out << "key " << key.id << ' ' << format_plain(key.weight);
        write_attrs(out, key.attrs);
        out << '\n';
    }
    for (const SetId& set_id : collection.set_ids()) {
        out << "set " << set_id;
        const auto ground = collection.ground();
        for (std::size_t idx : collection.members(set_id)) out << ' ' << ground[idx].id;
        out << '\n';
    }
}

WeightedSetCollection read_collection(std::istream& in) {
    WeightedSetCollection collection;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        try {
            if (tokens[0] == "key") {
                if (tokens.size() < 3) throw std::invalid_argument("key line needs id and weight");
                Key key;
                key.id = parse_id(tokens[1]);
                key.weight = parse_double(tokens[2]);
                key.attrs = parse_attrs(tokens, 3);
                collection.add_key(std::move(key));
            } else if (tokens[0] == "set") {
                if (tokens.size() < 2) throw std::invalid_argument("set line needs a set id");
                for (std::size_t i = 2; i < tokens.size(); ++i) {
                    collection.add_member(tokens[1], parse_id(tokens[i]));
                }
            } else {
                throw std::invalid_argument("unknown directive: " + tokens[0]);
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return collection;
}

namespace {

void write_entry_line(std::ostream& out, const SketchEntry& entry) {
    out << "entry " << entry.key_id << ' ' << format_hex(entry.rank) << ' '
        << format_plain(entry.weight);
    write_attrs(out, entry.attrs);
    out << '\n';
}

SketchEntry parse_entry_line(const std::vector<std::string>& tokens) {
    if (tokens.size() < 4) throw std::invalid_argument("entry line needs id, rank and weight");
    SketchEntry entry;
    entry.key_id = parse_id(tokens[1]);
    entry.rank = parse_double(tokens[2]);
    entry.weight = parse_double(tokens[3]);
    entry.attrs = parse_attrs(tokens, 4);
    return entry;
}

}  // namespace

void write_sketch(std::ostream& out, const BottomKSketch& sketch) {
    out << "sketch " << sketch.set_id << ' ' << sketch.k << ' ' << format_hex(sketch.threshold)
        << '\n';
    for (const SketchEntry& entry : sketch.entries) write_entry_line(out, entry);
}

void write_sketches(std::ostream& out, const std::map<SetId, BottomKSketch>& sketches) {
    for (const auto& [id, sketch] : sketches) write_sketch(out, sketch);
}

std::map<SetId, BottomKSketch> read_sketches(std::istream& in, RankFamily family) {
    std::map<SetId, BottomKSketch> sketches;
    BottomKSketch* current = nullptr;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        try {
            if (tokens[0] == "sketch") {
                if (tokens.size() < 4) {
                    throw std::invalid_argument("sketch line needs set id, k and threshold");
                }
                BottomKSketch sketch;
                sketch.set_id = tokens[1];
                sketch.family = family;
                sketch.k = static_cast<int>(parse_id(tokens[2]));
                sketch.threshold = parse_double(tokens[3]);
                auto [it, inserted] = sketches.emplace(sketch.set_id, std::move(sketch));
                if (!inserted) throw std::invalid_argument("duplicate sketch for " + tokens[1]);
                current = &it->second;
            } else if (tokens[0] == "entry") {
                if (!current) throw std::invalid_argument("entry before any sketch header");
                current->entries.push_back(parse_entry_line(tokens));
            } else {
                throw std::invalid_argument("unknown directive: " + tokens[0]);
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return sketches;
}

void write_combination(std::ostream& out, const Combination& combination) {
    out << "combination " << to_string(combination.kind) << ' ' << combination.k << ' '
        << format_hex(combination.threshold) << '\n';
    out << "source";
    for (const SetId& id : combination.sources) out << ' ' << id;
    out << '\n';
    for (const SketchEntry& entry : combination.entries) write_entry_line(out, entry);
    if (combination.kind == CombinationKind::lcs) {
        for (std::size_t i = 0; i < combination.size(); ++i) {
            out << "tau " << combination.entries[i].key_id << ' '
                << format_hex(combination.entry_tau[i]) << '\n';
        }
    }
    for (std::size_t i = 0; i < combination.size(); ++i) {
        for (std::size_t s = 0; s < combination.sources.size(); ++s) {
            out << "member " << combination.entries[i].key_id << ' ' << combination.sources[s]
                << ' ' << to_string(combination.membership_at(i, s)) << '\n';
        }
    }
}

void write_poisson(std::ostream& out, const PoissonSample& sample) {
    out << "poisson " << sample.set_id << ' ' << format_hex(sample.tau) << '\n';
    for (const PoissonEntry& entry : sample.entries) {
        out << "entry " << entry.key_id << ' ' << format_hex(entry.rank) << ' '
            << format_plain(entry.weight) << '\n';
    }
}

std::map<SetId, PoissonSample> read_poisson(std::istream& in, RankFamily family) {
    std::map<SetId, PoissonSample> samples;
    PoissonSample* current = nullptr;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        try {
            if (tokens[0] == "poisson") {
                if (tokens.size() < 3) {
                    throw std::invalid_argument("poisson line needs set id and tau");
                }
                PoissonSample sample;
                sample.set_id = tokens[1];
                sample.family = family;
                sample.tau = parse_double(tokens[2]);
                auto [it, inserted] = samples.emplace(sample.set_id, std::move(sample));
                if (!inserted) throw std::invalid_argument("duplicate sample for " + tokens[1]);
                current = &it->second;
            } else if (tokens[0] == "entry") {
                if (!current) throw std::invalid_argument("entry before any poisson header");
                if (tokens.size() < 4) {
                    throw std::invalid_argument("entry line needs id, rank and weight");
                }
                PoissonEntry entry;
                entry.key_id = parse_id(tokens[1]);
                entry.rank = parse_double(tokens[2]);
                entry.weight = parse_double(tokens[3]);
                current->entries.push_back(entry);
            } else {
                throw std::invalid_argument("unknown directive: " + tokens[0]);
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return samples;
}

}  // namespace coordsketch
