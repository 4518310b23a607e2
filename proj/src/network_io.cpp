#include "odtomo/network_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "odtomo/error.hpp"

namespace odtomo {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(const std::string& token, T& out) {
    if constexpr (std::is_floating_point_v<T>) {
        try {
            std::size_t used = 0;
            out = static_cast<T>(std::stod(token, &used));
            return used == token.size();
        } catch (const std::exception&) {
            return false;
        }
    } else {
        const auto* end = token.data() + token.size();
        auto [ptr, ec] = std::from_chars(token.data(), end, out);
        return ec == std::errc{} && ptr == end;
    }
}

} // namespace

Network read_tntp(std::istream& in, const std::string& source_name) {
    std::size_t declared_nodes = 0;
    std::size_t declared_links = 0;
    bool have_links = false;
    std::size_t max_node = 0;
    struct Record {
        std::size_t tail;
        std::size_t head;
        double time;
        std::size_t line;
    };
    std::vector<Record> records;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '~') {
            continue;
        }
        if (t[0] == '<') {
            const auto close = t.find('>');
            if (close == std::string::npos) {
                throw ParseError(source_name, lineno, "unterminated metadata tag");
            }
            const std::string key = t.substr(1, close - 1);
            const std::string value = trim(t.substr(close + 1));
            if (key == "NUMBER OF NODES" && !parse_number(value, declared_nodes)) {
                throw ParseError(source_name, lineno, "bad node count '" + value + "'");
            }
            if (key == "NUMBER OF LINKS") {
                if (!parse_number(value, declared_links)) {
                    throw ParseError(source_name, lineno, "bad link count '" + value + "'");
                }
                have_links = true;
            }
            continue;
        }
        std::istringstream fields(t);
        std::vector<std::string> tokens;
        for (std::string tok; fields >> tok;) {
            if (tok == ";") {
                break;
            }
            if (tok.back() == ';') {
                tok.pop_back();
            }
            if (!tok.empty()) {
                tokens.push_back(tok);
            }
        }
        if (tokens.empty()) {
            continue;
        }
        if (tokens.size() < 5) {
            throw ParseError(source_name, lineno, "expected at least 5 fields, found " + std::to_string(tokens.size()));
        }
        Record r{};
        r.line = lineno;
        if (!parse_number(tokens[0], r.tail) || !parse_number(tokens[1], r.head) || r.tail == 0 || r.head == 0) {
            throw ParseError(source_name, lineno, "bad node id");
        }
        if (!parse_number(tokens[4], r.time)) {
            throw ParseError(source_name, lineno, "bad free-flow time '" + tokens[4] + "'");
        }
        if (!(r.time > 0.0)) {
            throw ParseError(source_name, lineno, "free-flow time must be positive");
        }
        max_node = std::max({max_node, r.tail, r.head});
        records.push_back(r);
    }
    if (records.empty()) {
        throw ParseError(source_name, lineno, "no link records");
    }
    if (have_links && declared_links != records.size()) {
        throw ParseError(source_name, lineno,
                         "header declares " + std::to_string(declared_links) + " links, found " +
                             std::to_string(records.size()));
    }
    const std::size_t n = std::max(declared_nodes, max_node);
    if (declared_nodes != 0 && max_node > declared_nodes) {
        throw ParseError(source_name, lineno, "node id exceeds declared node count");
    }
    std::vector<std::string> names(n);
    for (std::size_t i = 0; i < n; ++i) {
        names[i] = std::to_string(i + 1);
    }
    std::vector<Edge> edges;
    edges.reserve(records.size());
    for (const auto& r : records) {
        edges.push_back(Edge{r.tail - 1, r.head - 1, r.time});
    }
    try {
        return Network(std::move(names), std::move(edges));
    } catch (const InvalidInput& e) {
        throw ParseError(source_name, 0, e.what());
    }
}

Network read_network_json(std::istream& in, const std::string& source_name) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source_name, 0, e.what());
    }
    auto id_of = [](const nlohmann::json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); };
    try {
        std::vector<std::string> names;
        std::map<std::string, std::size_t> index;
        for (const auto& n : doc.at("nodes")) {
            const std::string name = id_of(n);
            if (!index.emplace(name, names.size()).second) {
                throw ParseError(source_name, 0, "duplicate node '" + name + "'");
            }
            names.push_back(name);
        }
        std::vector<Edge> edges;
        for (const auto& e : doc.at("edges")) {
            const std::string from = id_of(e.at("from"));
            const std::string to = id_of(e.at("to"));
            if (!index.contains(from) || !index.contains(to)) {
                throw ParseError(source_name, 0, "edge " + from + " -> " + to + " references an unknown node");
            }
            edges.push_back(Edge{index[from], index[to], e.at("time").get<double>()});
        }
        return Network(std::move(names), std::move(edges));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source_name, 0, e.what());
    } catch (const InvalidInput& e) {
        throw ParseError(source_name, 0, e.what());
    }
}

Network load_network(const std::string& path, NetworkFormat format) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, "cannot open file");
    }
    return format == NetworkFormat::Tntp ? read_tntp(in, path) : read_network_json(in, path);
}

NetworkFormat guess_format(const std::string& path) {
    const std::string ext = ".tntp";
    if (path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0) {
        return NetworkFormat::Tntp;
    }
    return NetworkFormat::Json;
}

NetworkFormat parse_format(const std::string& name) {
    if (name == "tntp") {
        return NetworkFormat::Tntp;
    }
    if (name == "json") {
        return NetworkFormat::Json;
    }
    throw InvalidInput("unknown network format '" + name + "' (expected tntp or json)");
}

} // namespace odtomo
