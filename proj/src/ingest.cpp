#include "gts/cli/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gts::cli {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& s, std::size_t line, const char* field) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        fail(line, std::string("invalid ") + field + " '" + s + "'");
    }
    return v;
}

int parse_year(const std::string& s, std::size_t line) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        fail(line, "invalid year '" + s + "'");
    }
    return v;
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return in;
}

}  // namespace

GroupedHierarchy parse_hierarchy(std::istream& in) {
    std::map<std::string, std::vector<std::string>> entries;
    std::map<std::string, std::size_t> lines;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = trim(raw.substr(0, raw.find('#')));
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            fail(line, "expected 'key = value'");
        }
        const auto key = trim(std::string_view(text).substr(0, eq));
        if (key.empty() || entries.count(key) > 0) {
            fail(line, key.empty() ? "empty key" : "duplicate key '" + key + "'");
        }
        entries[key] = split(std::string_view(text).substr(eq + 1), ',');
        lines[key] = line;
    }
    const auto it = entries.find("attributes");
    if (it == entries.end()) {
        throw std::runtime_error("hierarchy declaration has no 'attributes' entry");
    }
    std::vector<Attribute> attributes;
    for (const auto& name : it->second) {
        const auto values = entries.find(name);
        if (name.empty() || values == entries.end()) {
            fail(lines["attributes"], "attribute '" + name + "' has no value list");
        }
        attributes.push_back(Attribute{name, values->second});
    }
    for (const auto& [key, l] : lines) {
        if (key != "attributes" &&
            std::none_of(attributes.begin(), attributes.end(), [&](const Attribute& a) { return a.name == key; })) {
            fail(l, "'" + key + "' is not a declared attribute");
        }
    }
    try {
        return GroupedHierarchy::build(std::move(attributes));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("invalid hierarchy: ") + e.what());
    }
}

GroupedHierarchy read_hierarchy(const std::filesystem::path& path) {
    auto in = open(path);
    try {
        return parse_hierarchy(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

std::string format_hierarchy(const GroupedHierarchy& hierarchy) {
    std::ostringstream out;
    const auto& attrs = hierarchy.attributes();
    out << "attributes = ";
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        out << (i ? ", " : "") << attrs[i].name;
    }
    out << '\n';
    for (const auto& a : attrs) {
        out << a.name << " = ";
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            out << (i ? ", " : "") << a.values[i];
        }
        out << '\n';
    }
    return out.str();
}

Ingested parse_panel(std::istream& in, const GroupedHierarchy& hierarchy) {
    const auto& attrs = hierarchy.attributes();
    const std::size_t na = attrs.size();
    std::string raw;
    std::size_t line = 0;
    while (raw.empty() && std::getline(in, raw)) {
        ++line;
        raw = trim(raw);
    }
    if (raw.empty()) {
        throw std::runtime_error("panel file is empty");
    }
    std::vector<std::string> expected{"year"};
    for (const auto& a : attrs) {
        expected.push_back(a.name);
    }
    expected.insert(expected.end(), {"deaths", "exposure"});
    if (split(raw, ',') != expected) {
        std::string want;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            want += (i ? "," : "") + expected[i];
        }
        fail(line, "header must be '" + want + "'");
    }

    struct Cell {
        double deaths;
        double exposure;
        std::size_t line;
    };
    std::map<std::pair<int, std::size_t>, Cell> bottom_cells;
    std::vector<std::pair<std::pair<int, std::size_t>, Cell>> aggregate_cells;
    std::map<std::pair<int, std::size_t>, std::size_t> seen;
    IngestReport report;

    while (std::getline(in, raw)) {
        ++line;
        if (trim(raw).empty()) {
            continue;
        }
        const auto fields = split(raw, ',');
        if (fields.size() != expected.size()) {
            fail(line, "expected " + std::to_string(expected.size()) + " fields, got " + std::to_string(fields.size()));
        }
        const int year = parse_year(fields[0], line);
        GroupKey key;
        for (std::size_t a = 0; a < na; ++a) {
            const auto& v = fields[1 + a];
            if (v != kAggregate && std::find(attrs[a].values.begin(), attrs[a].values.end(), v) == attrs[a].values.end()) {
                fail(line, "unknown " + attrs[a].name + " value '" + v + "'");
            }
            key.values.push_back(v);
        }
        const auto node = hierarchy.find(key);
        if (!node) {
            fail(line, "unknown node");
        }
        const double deaths = parse_number(fields[1 + na], line, "deaths");
        const double exposure = parse_number(fields[2 + na], line, "exposure");
        if (deaths < 0.0) {
            fail(line, "negative deaths");
        }
        if (!(exposure > 0.0)) {
            fail(line, "nonpositive exposure for " + hierarchy.label(*node) + " in " + std::to_string(year));
        }
        const auto id = std::make_pair(year, *node);
        if (const auto prev = seen.find(id); prev != seen.end()) {
            fail(line, "duplicate row for " + hierarchy.label(*node) + " in " + std::to_string(year) +
                           " (first at line " + std::to_string(prev->second) + ")");
        }
        seen[id] = line;
        ++report.rows;
        if (key.is_bottom()) {
            bottom_cells[id] = Cell{deaths, exposure, line};
        } else {
            ++report.aggregate_rows;
            aggregate_cells.push_back({id, Cell{deaths, exposure, line}});
        }
    }
    if (bottom_cells.empty()) {
        throw std::runtime_error("panel has no bottom-level rows");
    }

    int first = bottom_cells.begin()->first.first;
    int last = first;
    for (const auto& [id, c] : bottom_cells) {
        first = std::min(first, id.first);
        last = std::max(last, id.first);
    }
    const std::size_t offset = hierarchy.bottom_offset();
    const std::size_t mk = hierarchy.bottom_count();
    std::vector<int> years;
    std::vector<NodeSeries> bottom(mk);
    for (int y = first; y <= last; ++y) {
        years.push_back(y);
        for (std::size_t k = 0; k < mk; ++k) {
            const auto it = bottom_cells.find({y, offset + k});
            if (it == bottom_cells.end()) {
                throw std::runtime_error("missing row for " + hierarchy.label(offset + k) + " in " + std::to_string(y));
            }
            bottom[k].deaths.push_back(it->second.deaths);
            bottom[k].exposure.push_back(it->second.exposure);
        }
    }

    auto panel = Panel::aggregate(hierarchy, years, std::move(bottom));
    for (const auto& [id, c] : aggregate_cells) {
        const auto& [year, node] = id;
        if (year < first || year > last) {
            fail(c.line, "aggregate row outside the bottom-level years");
        }
        const auto t = static_cast<std::size_t>(year - first);
        const auto& derived = panel.node(node);
        if (std::abs(derived.deaths[t] - c.deaths) > 1e-9 * std::max(1.0, std::abs(c.deaths))) {
            fail(c.line, "deaths of " + hierarchy.label(node) + " differ from the sum of its children");
        }
        if (std::abs(derived.exposure[t] - c.exposure) > 1e-9 * std::abs(c.exposure)) {
            fail(c.line, "exposure of " + hierarchy.label(node) + " differs from the sum of its children");
        }
    }
    report.first_year = first;
    report.last_year = last;
    report.nodes = hierarchy.size();
    report.bottom_nodes = mk;
    return Ingested{std::move(panel), report};
}

Ingested read_panel(const std::filesystem::path& path, const GroupedHierarchy& hierarchy) {
    auto in = open(path);
    try {
        return parse_panel(in, hierarchy);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_panel(std::ostream& out, const Panel& panel) {
    const auto& h = panel.hierarchy();
    out << "year";
    for (const auto& a : h.attributes()) {
        out << ',' << a.name;
    }
    out << ",deaths,exposure\n";
    for (std::size_t t = 0; t < panel.length(); ++t) {
        for (std::size_t j = h.bottom_offset(); j < h.size(); ++j) {
            out << panel.years()[t];
            for (const auto& v : h.key(j).values) {
                out << ',' << v;
            }
            const auto& s = panel.node(j);
            char buf[64];
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", s.deaths[t], s.exposure[t]);
            out << buf;
        }
    }
}

}  // namespace gts::cli
