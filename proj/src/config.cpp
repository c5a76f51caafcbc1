#include "fetbind/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace fetbind {

namespace {

struct Entry {
    std::string value;  // scalar token or unsplit list body
    bool is_list = false;
    int line = 0;
    bool used = false;
};

using Block = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
    std::ostringstream os;
    os << name << ":" << line << ": " << msg;
    throw ConfigError(os.str());
}

std::map<std::string, Block> parse_blocks(const std::string& text, const std::string& name) {
    std::map<std::string, Block> blocks;
    std::istringstream in(text);
    std::string raw;
    std::string current;
    int current_line = 0;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        std::string s = trim(raw);
        if (s.empty()) continue;
        if (s == "}") {
            if (current.empty()) fail(name, line, "unmatched '}'");
            current.clear();
            continue;
        }
        if (s.back() == '{') {
            if (!current.empty()) fail(name, line, "nested blocks are not supported");
            current = trim(s.substr(0, s.size() - 1));
            if (current.empty()) fail(name, line, "block name missing before '{'");
            if (blocks.count(current)) fail(name, line, "duplicate block '" + current + "'");
            blocks[current] = {};
            current_line = line;
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) {
            fail(name, line, "expected 'key = value' or a block");
        }
        if (current.empty()) fail(name, line, "key outside any block");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(name, line, "empty key");
        if (value.empty()) fail(name, line, "empty value for '" + key + "'");
        Entry e;
        e.line = line;
        if (value.front() == '[') {
            if (value.back() != ']') fail(name, line, "unterminated list for '" + key + "'");
            e.is_list = true;
            e.value = value.substr(1, value.size() - 2);
        } else {
            e.value = value;
        }
        auto& block = blocks[current];
        if (block.count(key)) fail(name, line, "duplicate key '" + key + "'");
        block[key] = e;
    }
    if (!current.empty()) fail(name, current_line, "block '" + current + "' never closed");
    return blocks;
}

std::vector<std::string> split_list(const std::string& body) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(body);
    while (std::getline(in, item, ',')) {
        std::string t = trim(item);
        if (!t.empty()) items.push_back(t);
    }
    return items;
}

class BlockReader {
public:
    BlockReader(const std::string& file, const std::string& block_name, Block& block)
        : file_(file), block_name_(block_name), block_(block) {}

    bool has(const std::string& key) const { return block_.count(key) > 0; }

    double number(const std::string& key) {
        Entry& e = fetch(key, false);
        return to_number(e.value, e.line, key);
    }

    double number_or(const std::string& key, double fallback) {
        return has(key) ? number(key) : fallback;
    }

    int integer(const std::string& key) {
        double v = number(key);
        int i = static_cast<int>(v);
        if (double(i) != v) {
            fail(file_, block_[key].line, "'" + key + "' must be an integer");
        }
        return i;
    }

    int integer_or(const std::string& key, int fallback) {
        return has(key) ? integer(key) : fallback;
    }

    std::string word(const std::string& key) { return fetch(key, false).value; }

    std::string word_or(const std::string& key, const std::string& fallback) {
        return has(key) ? word(key) : fallback;
    }

    std::vector<double> numbers(const std::string& key) {
        Entry& e = fetch(key, true);
        std::vector<double> out;
        for (const auto& item : split_list(e.value)) {
            out.push_back(to_number(item, e.line, key));
        }
        if (out.empty()) fail(file_, e.line, "list '" + key + "' is empty");
        return out;
    }

    std::vector<std::string> words(const std::string& key) {
        Entry& e = fetch(key, true);
        auto out = split_list(e.value);
        if (out.empty()) fail(file_, e.line, "list '" + key + "' is empty");
        return out;
    }

    /// The key may hold either a scalar count or an explicit list.
    bool is_list(const std::string& key) {
        if (!has(key)) return false;
        return block_[key].is_list;
    }

    void finish() const {
        for (const auto& [key, e] : block_) {
            if (!e.used) {
                fail(file_, e.line, "unknown key '" + key + "' in block '" + block_name_ + "'");
            }
        }
    }

    int line_of(const std::string& key) { return block_[key].line; }

private:
    Entry& fetch(const std::string& key, bool want_list) {
        auto it = block_.find(key);
        if (it == block_.end()) {
            fail(file_, 0, "missing key '" + key + "' in block '" + block_name_ + "'");
        }
        if (it->second.is_list != want_list) {
            fail(file_, it->second.line,
                 want_list ? "'" + key + "' must be a [list]" : "'" + key + "' must be a scalar");
        }
        it->second.used = true;
        return it->second;
    }

    double to_number(const std::string& token, int line, const std::string& key) {
        try {
            std::size_t pos = 0;
            double v = std::stod(token, &pos);
            if (pos != token.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            fail(file_, line, "'" + key + "': cannot parse number from '" + token + "'");
        }
    }

    const std::string& file_;
    std::string block_name_;
    Block& block_;
};

}  // namespace

DimensionlessParams RunConfig::resolve_params() const {
    if (dimensional) return nondimensionalize(*dimensional);
    return *dimensionless;
}

RunConfig parse_config(const std::string& text, const std::string& name) {
    auto blocks = parse_blocks(text, name);
    RunConfig cfg;

    const bool has_dim = blocks.count("dimensional") > 0;
    const bool has_dimless = blocks.count("dimensionless") > 0;
    if (has_dim == has_dimless) {
        throw ConfigError(name +
                          ": exactly one of the 'dimensional' and 'dimensionless' blocks "
                          "must be present");
    }

    if (has_dim) {
        BlockReader r(name, "dimensional", blocks["dimensional"]);
        DimensionalParams d;
        d.diffusivity = r.number("diffusivity");
        d.assoc_rate = r.number("assoc_rate");
        d.dissoc_rate = r.number("dissoc_rate");
        d.inject_conc = r.number("inject_conc");
        d.receptor_density = r.number("receptor_density");
        d.well_height = r.number("well_height");
        d.well_length = r.number("well_length");
        d.gate_length = r.number("gate_length");
        r.finish();
        try {
            d.validate();
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(name + ": dimensional block: " + ex.what());
        }
        cfg.dimensional = d;
    } else {
        BlockReader r(name, "dimensionless", blocks["dimensionless"]);
        DimensionlessParams p;
        p.damkohler = r.number("Da");
        p.dissoc_const = r.number("K");
        p.gate_ratio = r.number("l_s");
        p.aspect = r.number("epsilon");
        if (r.has("Da_w")) p.damkohler_well = r.number("Da_w");
        if (r.has("D_w")) p.diffusion_well = r.number("D_w");
        if (r.has("D")) p.diffusion_gate = r.number("D");
        r.finish();
        try {
            p.validate();
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(name + ": dimensionless block: " + ex.what());
        }
        cfg.dimensionless = p;
    }

    if (blocks.count("solver")) {
        BlockReader r(name, "solver", blocks["solver"]);
        SolveConfig& s = cfg.solver;
        s.n_nodes = r.integer_or("n_nodes", s.n_nodes);
        s.t_end = r.number_or("t_end", s.t_end);
        if (r.has("output_times")) {
            if (r.is_list("output_times")) {
                s.output_times = r.numbers("output_times");
            } else {
                s.output_count = r.integer("output_times");
            }
        }
        std::string kind = r.word_or("integrator", "adaptive");
        if (kind == "adaptive") {
            s.integrator = Integrator::adaptive_rk;
        } else if (kind == "implicit-euler") {
            s.integrator = Integrator::implicit_euler;
        } else {
            fail(name, r.line_of("integrator"),
                 "integrator must be 'adaptive' or 'implicit-euler'");
        }
        s.rel_tol = r.number_or("rel_tol", s.rel_tol);
        s.abs_tol = r.number_or("abs_tol", s.abs_tol);
        s.fixed_dt = r.number_or("fixed_dt", s.fixed_dt);
        s.newton_tol = r.number_or("newton_tol", s.newton_tol);
        s.newton_max_iter = r.integer_or("newton_max_iter", s.newton_max_iter);
        r.finish();
        try {
            s.validate();
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(name + ": solver block: " + ex.what());
        }
    }

    if (blocks.count("output")) {
        BlockReader r(name, "output", blocks["output"]);
        cfg.output.directory = r.word_or("directory", "");
        std::string fmt = r.word_or("format", "csv");
        if (fmt == "csv") {
            cfg.output.format = OutputConfig::Format::csv;
        } else if (fmt == "json") {
            cfg.output.format = OutputConfig::Format::json;
        } else {
            fail(name, r.line_of("format"), "format must be 'csv' or 'json'");
        }
        cfg.output.precision = r.integer_or("precision", 12);
        if (cfg.output.precision < 6) {
            fail(name, r.line_of("precision"), "precision must be at least 6");
        }
        r.finish();
    }

    if (blocks.count("sweep")) {
        BlockReader r(name, "sweep", blocks["sweep"]);
        SweepConfig sw;
        std::string axis = r.word("axis");
        if (axis == "assoc_rate") {
            sw.axis = SweepConfig::Axis::assoc_rate;
        } else if (axis == "inject_conc") {
            sw.axis = SweepConfig::Axis::inject_conc;
        } else if (axis == "K") {
            sw.axis = SweepConfig::Axis::dissoc_const;
        } else {
            fail(name, r.line_of("axis"), "sweep axis must be assoc_rate, inject_conc or K");
        }
        sw.values = r.numbers("values");
        if (r.has("labels")) {
            sw.labels = r.words("labels");
            if (sw.labels.size() != sw.values.size()) {
                fail(name, r.line_of("labels"), "labels and values must have equal length");
            }
        } else {
            for (std::size_t i = 0; i < sw.values.size(); ++i) {
                sw.labels.push_back("p" + std::to_string(i + 1));
            }
        }
        r.finish();
        const bool dimensional_axis = sw.axis != SweepConfig::Axis::dissoc_const;
        if (dimensional_axis && !cfg.dimensional) {
            throw ConfigError(name +
                              ": sweeping a dimensional quantity requires the 'dimensional' "
                              "block");
        }
        if (!dimensional_axis && !cfg.dimensionless) {
            throw ConfigError(name + ": sweeping K requires the 'dimensionless' block");
        }
        cfg.sweep = sw;
    }

    if (blocks.count("converge")) {
        BlockReader r(name, "converge", blocks["converge"]);
        ConvergeConfig cv;
        cv.i_max = r.integer("i_max");
        if (cv.i_max < 2 || cv.i_max > 7) {
            fail(name, r.line_of("i_max"), "i_max must lie in [2, 7]");
        }
        r.finish();
        cfg.converge = cv;
    }

    if (blocks.count("oracle")) {
        BlockReader r(name, "oracle", blocks["oracle"]);
        OracleConfig oc;
        oc.suites = r.words("suites");
        for (const auto& s : oc.suites) {
            if (s != "polylog" && s != "kernel-integrals" && s != "laplace-strip") {
                fail(name, r.line_of("suites"), "unknown oracle suite '" + s + "'");
            }
        }
        oc.n_nodes = r.integer_or("n_nodes", oc.n_nodes);
        oc.gate_ratio = r.number_or("l_s", oc.gate_ratio);
        oc.aspect = r.number_or("epsilon", oc.aspect);
        oc.strip_height = r.number_or("strip_height", oc.strip_height);
        r.finish();
        cfg.oracle = oc;
    }

    for (const auto& [block_name, block] : blocks) {
        static const char* known[] = {"dimensional", "dimensionless", "solver", "output",
                                      "sweep",       "converge",      "oracle"};
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
                return block_name == k;
            }) == std::end(known)) {
            throw ConfigError(name + ": unknown block '" + block_name + "'");
        }
    }

    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open configuration file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

}  // namespace fetbind
