#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace toda::cli {

std::vector<double> DeltaGrid::values() const {
    std::vector<double> v;
    if (n == 1) return {max};
    for (int i = 0; i < n; ++i)
        v.push_back(std::exp(std::log(max) + (std::log(min) - std::log(max)) * i / (n - 1)));
    return v;
}

namespace {

// Reader over one mapping; records which keys were consumed.
class Section {
public:
    Section(YAML::Node node, std::string prefix) : node_(std::move(node)), prefix_(std::move(prefix)) {
        if (node_ && !node_.IsNull() && !node_.IsMap())
            throw ConfigError(prefix_.empty() ? "<root>" : prefix_.substr(0, prefix_.size() - 1),
                              "expected a mapping");
    }

    std::string key(const std::string& k) const { return prefix_ + k; }

    template <typename T>
    void read(const std::string& k, T& out, const char* expected) {
        seen_.insert(k);
        if (!node_ || !node_.IsMap()) return;
        const YAML::Node v = node_[k];
        if (!v || v.IsNull()) return;
        try {
            if (!v.IsScalar()) throw YAML::BadConversion(v.Mark());
            out = v.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(key(k), std::string("expected ") + expected);
        }
    }

    template <typename T>
    void read_list(const std::string& k, std::vector<T>& out, const char* expected) {
        seen_.insert(k);
        if (!node_ || !node_.IsMap()) return;
        const YAML::Node v = node_[k];
        if (!v || v.IsNull()) return;
        try {
            if (v.IsScalar()) {
                out = {v.as<T>()};
                return;
            }
            if (!v.IsSequence()) throw YAML::BadConversion(v.Mark());
            out.clear();
            for (const auto& e : v) out.push_back(e.as<T>());
        } catch (const YAML::Exception&) {
            throw ConfigError(key(k), std::string("expected a list of ") + expected);
        }
    }

    // Complex entries are numbers or [re, im] pairs.
    void read_complex_list(const std::string& k, std::vector<cplx>& out) {
        seen_.insert(k);
        if (!node_ || !node_.IsMap()) return;
        const YAML::Node v = node_[k];
        if (!v || v.IsNull()) return;
        auto one = [&](const YAML::Node& e) -> cplx {
            if (e.IsScalar()) return e.as<double>();
            if (e.IsSequence() && e.size() == 2) return {e[0].as<double>(), e[1].as<double>()};
            throw YAML::BadConversion(e.Mark());
        };
        try {
            out.clear();
            if (v.IsScalar()) {
                out.push_back(one(v));
                return;
            }
            if (!v.IsSequence()) throw YAML::BadConversion(v.Mark());
            for (const auto& e : v) out.push_back(one(e));
        } catch (const YAML::Exception&) {
            throw ConfigError(key(k), "expected a list of numbers or [re, im] pairs");
        }
    }

    Section sub(const std::string& k) {
        seen_.insert(k);
        return Section(node_ && node_.IsMap() ? node_[k] : YAML::Node(), prefix_ + k + ".");
    }

    void reject_unknown() const {
        if (!node_ || !node_.IsMap()) return;
        for (const auto& kv : node_) {
            const auto k = kv.first.as<std::string>();
            if (!seen_.count(k)) throw ConfigError(key(k), "unknown key");
        }
    }

private:
    YAML::Node node_;
    std::string prefix_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& msg) {
    if (!ok) throw ConfigError(key, msg);
}

void read_grid(Section& s, DeltaGrid& g) {
    s.read("min", g.min, "a number");
    s.read("max", g.max, "a number");
    s.read("n", g.n, "an integer");
    s.reject_unknown();
    require(g.min > 0, s.key("min"), "must be positive");
    require(g.max >= g.min, s.key("max"), "must be >= min");
    require(g.n >= 1 && g.n <= 10000, s.key("n"), "must lie in 1..10000");
}

}  // namespace

RunConfig parse_config(const YAML::Node& node, const std::string& command) {
    RunConfig c;
    require(std::find(kCommands.begin(), kCommands.end(), command) != kCommands.end(), "command",
            "unknown command '" + command + "'");
    c.command = command;
    Section root(node, "");

    std::string file_command;
    root.read("command", file_command, "a string");
    root.read_list("leaf", c.leaf, "integers");
    root.read_complex_list("zeta", c.zeta);
    root.read_list("q", c.q, "integers");
    root.read("k_max", c.k_max, "an integer");
    root.read("char_order", c.char_order, "an integer");
    root.read("threads", c.threads, "an integer");
    root.read("out", c.out, "a string");

    Section rn = root.sub("renorm");
    rn.read("J", c.renorm.J, "an integer");
    rn.read("alpha", c.renorm.alpha, "a number");
    rn.read("beta", c.renorm.beta, "a number");
    rn.read("tail_tol", c.renorm.tail_tol, "a number");
    rn.reject_unknown();

    Section path = root.sub("path");
    path.read("vary", c.path.vary, "an integer");
    std::vector<double> bracket{c.path.lo, c.path.hi};
    path.read_list("bracket", bracket, "numbers");
    path.reject_unknown();
    require(bracket.size() == 2 && bracket[0] < bracket[1], "path.bracket", "expected [lo, hi] with lo < hi");
    c.path.lo = bracket[0];
    c.path.hi = bracket[1];

    Section dg = root.sub("delta");
    read_grid(dg, c.delta);

    Section se = root.sub("series");
    se.read("order", c.series.order, "an integer");
    se.read("p_max", c.series.p_max, "an integer");
    se.read("alpha", c.series.alpha, "a number");
    se.reject_unknown();

    Section lg = root.sub("lg");
    lg.read("r0", c.lg.r0, "a number");
    lg.read_list("a0", c.lg.a0, "numbers");
    lg.read("dT", c.lg.dT, "a number");
    lg.read("T_max", c.lg.T_max, "a number");
    lg.read("scan", c.lg.scan, "a boolean");
    Section lgd = lg.sub("delta");
    read_grid(lgd, c.lg.delta);
    lg.reject_unknown();

    Section lv = root.sub("leaves");
    lv.read("kind", c.leaves.kind, "a string");
    lv.read("b_min", c.leaves.b_min, "a number");
    lv.read("b_max", c.leaves.b_max, "a number");
    lv.read("nb", c.leaves.nb, "an integer");
    lv.read("y_min", c.leaves.y_min, "a number");
    lv.read("y_max", c.leaves.y_max, "a number");
    lv.read("ny", c.leaves.ny, "an integer");
    lv.read("gamma_tol", c.leaves.gamma_tol, "a number");
    lv.reject_unknown();
    root.reject_unknown();

    // Ranges mirror the module preconditions.
    Leaf leaf;
    try {
        leaf = Leaf::make(c.leaf);
    } catch (const Error& e) {
        throw ConfigError("leaf", e.what());
    }
    require(c.zeta.size() == c.leaf.size(), "zeta", "needs one entry per leaf exponent");
    require(!c.q.empty(), "q", "must not be empty");
    for (int q : c.q) require(q >= 1 && q <= leaf.s, "q", "entries must lie in 1..s");
    require(c.k_max >= 1, "k_max", "must be >= 1");
    require(c.char_order >= 40, "char_order", "must be >= 40");
    require(c.threads >= 1 && c.threads <= 1024, "threads", "must lie in 1..1024");
    require(!c.out.empty(), "out", "must not be empty");
    require(c.renorm.J >= 1, "renorm.J", "must be >= 1");
    require(c.renorm.alpha > 1, "renorm.alpha", "must exceed 1");
    require(c.renorm.beta > 0, "renorm.beta", "must be positive");
    require(c.renorm.tail_tol > 0 && c.renorm.tail_tol < 1, "renorm.tail_tol", "must lie in (0, 1)");
    for (int q : c.q) {
        RenormConfig r = c.renorm;
        r.q = q;
        try {
            r.validate(leaf.s);
        } catch (const Error& e) {
            throw ConfigError("renorm", e.what());
        }
    }
    require(c.path.vary >= 0 && c.path.vary < leaf.size(), "path.vary", "must index a leaf mode");
    require(c.path.lo > 0, "path.bracket", "lower end must be positive");
    require(c.delta.max < 1, "delta.max", "must be < 1");
    require(c.series.order >= 0, "series.order", "must be >= 0");
    require(c.series.p_max >= 1, "series.p_max", "must be >= 1");
    require(c.series.alpha > 0, "series.alpha", "must be positive");
    require(c.lg.r0 > 0, "lg.r0", "must be positive");
    if (command == "lg")
        require(c.lg.a0.size() == c.leaf.size(), "lg.a0", "needs one entry per leaf exponent");
    require(c.lg.dT > 0, "lg.dT", "must be positive");
    require(c.lg.T_max > 0, "lg.T_max", "must be positive");
    require(c.leaves.kind == "pole" || c.leaves.kind == "log", "leaves.kind", "expected pole or log");
    require(c.leaves.nb >= 0 && c.leaves.ny >= 0, "leaves.nb", "grid sizes must be >= 0");
    require(c.leaves.b_min <= c.leaves.b_max, "leaves.b_max", "must be >= b_min");
    require(c.leaves.y_min <= c.leaves.y_max, "leaves.y_max", "must be >= y_min");
    require(c.leaves.y_min > 0, "leaves.y_min", "must be positive");
    require(c.leaves.gamma_tol >= 1e-7, "leaves.gamma_tol", "must be >= 1e-7");
    return c;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    using J = nlohmann::ordered_json;
    auto grid = [](const DeltaGrid& g) { return J{{"min", g.min}, {"max", g.max}, {"n", g.n}}; };
    J zeta = J::array();
    for (const auto& z : c.zeta) zeta.push_back(J::array({z.real(), z.imag()}));
    J j;
    j["command"] = c.command;
    j["leaf"] = c.leaf;
    j["zeta"] = zeta;
    j["q"] = c.q;
    j["k_max"] = c.k_max;
    j["char_order"] = c.char_order;
    j["threads"] = c.threads;
    j["out"] = c.out;
    j["renorm"] = {{"J", c.renorm.J},
                   {"alpha", c.renorm.alpha},
                   {"beta", c.renorm.beta},
                   {"tail_tol", c.renorm.tail_tol}};
    j["path"] = {{"vary", c.path.vary}, {"bracket", {c.path.lo, c.path.hi}}};
    j["delta"] = grid(c.delta);
    j["series"] = {{"order", c.series.order}, {"p_max", c.series.p_max}, {"alpha", c.series.alpha}};
    j["lg"] = {{"r0", c.lg.r0},         {"a0", c.lg.a0},     {"dT", c.lg.dT},
               {"T_max", c.lg.T_max},   {"scan", c.lg.scan}, {"delta", grid(c.lg.delta)}};
    j["leaves"] = {{"kind", c.leaves.kind},   {"b_min", c.leaves.b_min}, {"b_max", c.leaves.b_max},
                   {"nb", c.leaves.nb},       {"y_min", c.leaves.y_min}, {"y_max", c.leaves.y_max},
                   {"ny", c.leaves.ny},       {"gamma_tol", c.leaves.gamma_tol}};
    return j;
}

namespace {

void set_path(YAML::Node node, const std::vector<std::string>& parts, std::size_t i,
              const YAML::Node& value, const std::string& dotted) {
    if (!node.IsMap()) throw ConfigError(dotted, "'" + parts[i - 1] + "' is not a mapping");
    if (i + 1 == parts.size()) {
        node[parts[i]] = value;
        return;
    }
    YAML::Node child = node[parts[i]];
    if (!child || child.IsNull()) child = YAML::Node(YAML::NodeType::Map);
    set_path(child, parts, i + 1, value, dotted);
    node[parts[i]] = child;
}

}  // namespace

void set_key(YAML::Node& root, const std::string& dotted, const std::string& value) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t dot; (dot = dotted.find('.', start)) != std::string::npos; start = dot + 1)
        parts.push_back(dotted.substr(start, dot - start));
    parts.push_back(dotted.substr(start));

    YAML::Node parsed;
    try {
        parsed = YAML::Load(value);
    } catch (const YAML::Exception&) {
        throw ConfigError(dotted, "cannot parse value '" + value + "'");
    }
    if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    set_path(root, parts, 0, parsed, dotted);
}

}  // namespace toda::cli
