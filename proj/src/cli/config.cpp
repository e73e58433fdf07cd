#include "drifting/config.hpp"

#include <charconv>
#include <functional>
#include <set>
#include <sstream>

#include "drifting/io.hpp"

namespace drifting {

ConfigError::ConfigError(std::string source, std::size_t line, std::string key, const std::string& what)
    : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " +
                         (key.empty() ? what : "key '" + key + "': " + what)),
      source_(std::move(source)),
      line_(line),
      key_(std::move(key)) {}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::size_t to_size(const std::string& s) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("expected a nonnegative integer, got '" + s + "'");
    }
    return v;
}

double to_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("expected a number, got '" + s + "'");
    }
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::vector<double> to_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(to_double(part));
    return out;
}

std::vector<std::size_t> to_sizes(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& part : split(s, ',')) out.push_back(to_size(part));
    return out;
}

template <class T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f, const char* sep = ",") {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) out += (k ? sep : "") + f(v[k]);
    return out;
}

std::string doubles_text(const std::vector<double>& v) {
    return join<double>(v, [](const double& d) { return format_double(d); });
}

std::string sizes_text(const std::vector<std::size_t>& v) {
    return join<std::size_t>(v, [](const std::size_t& d) { return std::to_string(d); });
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

// Raw target keys; the TargetSpec is assembled once all are known.
struct TargetKeys {
    std::string family;
    std::size_t dim = 2;
    std::vector<std::vector<double>> centers{{-2.0, 0.0}, {2.0, 0.0}};
    std::vector<std::size_t> center_classes;  // empty = all class 0
    std::vector<double> sigma{0.3};           // one value or one per center
    double radius = 2.0;
    double width = 0.1;
    std::size_t cells = 4;
    double cell_size = 1.0;
};

struct Draft {
    ExperimentConfig cfg;
    TargetKeys target;
};

struct KeyDef {
    const char* name;
    bool required;
    std::function<void(Draft&, const std::string&)> set;
    std::function<std::string(const Draft&)> get;
};

std::vector<std::vector<double>> parse_centers(const std::string& s) {
    std::vector<std::vector<double>> out;
    for (const auto& part : split(s, ';')) out.push_back(to_doubles(part));
    return out;
}

std::string centers_text(const std::vector<std::vector<double>>& c) {
    return join<std::vector<double>>(c, doubles_text, "; ");
}

std::string alpha_text(const TrainConfig& t) {
    return t.alpha_law == AlphaLaw::Fixed ? "fixed:" + format_double(t.alpha_fixed)
                                          : "power:" + format_double(t.alpha_power);
}

void set_alpha(TrainConfig& t, const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) throw std::invalid_argument("expected fixed:<alpha> or power:<k>");
    if (parts[0] == "fixed") {
        t.alpha_law = AlphaLaw::Fixed;
        t.alpha_fixed = to_double(parts[1]);
    } else if (parts[0] == "power") {
        t.alpha_law = AlphaLaw::Power;
        t.alpha_power = to_double(parts[1]);
    } else {
        throw std::invalid_argument("unknown alpha law '" + parts[0] + "'");
    }
}

#define SIZE_KEY(key, field)                                                      \
    KeyDef {                                                                      \
        key, false, [](Draft& d, const std::string& v) { d.field = to_size(v); }, \
            [](const Draft& d) { return std::to_string(d.field); }                \
    }
#define DOUBLE_KEY(key, field)                                                      \
    KeyDef {                                                                        \
        key, false, [](Draft& d, const std::string& v) { d.field = to_double(v); }, \
            [](const Draft& d) { return format_double(d.field); }                   \
    }
#define BOOL_KEY(key, field)                                                      \
    KeyDef {                                                                      \
        key, false, [](Draft& d, const std::string& v) { d.field = to_bool(v); }, \
            [](const Draft& d) { return bool_text(d.field); }                     \
    }

const std::vector<KeyDef>& key_table() {
    static const std::vector<KeyDef> table = {
        {"seed", false, [](Draft& d, const std::string& v) { d.cfg.train.seed = to_size(v); },
         [](const Draft& d) { return std::to_string(d.cfg.train.seed); }},
        SIZE_KEY("steps", cfg.train.steps),
        {"out.dir", false, [](Draft& d, const std::string& v) { d.cfg.out_dir = v; },
         [](const Draft& d) { return d.cfg.out_dir; }},
        SIZE_KEY("eval.every", cfg.train.eval_every),
        SIZE_KEY("eval.samples", cfg.train.eval_samples),
        DOUBLE_KEY("eval.alpha", cfg.train.eval_alpha),
        DOUBLE_KEY("eval.mode_radius", cfg.train.mode_radius),
        BOOL_KEY("eval.use_ema", cfg.train.eval_use_ema),
        BOOL_KEY("trace.wall_clock", cfg.train.record_wall_time),

        {"target.family", true,
         [](Draft& d, const std::string& v) {
             parse_target_family(v);
             d.target.family = v;
         },
         [](const Draft& d) { return d.target.family; }},
        SIZE_KEY("target.dim", target.dim),
        {"target.centers", false, [](Draft& d, const std::string& v) { d.target.centers = parse_centers(v); },
         [](const Draft& d) { return centers_text(d.target.centers); }},
        {"target.center_classes", false,
         [](Draft& d, const std::string& v) { d.target.center_classes = v.empty() ? std::vector<std::size_t>{} : to_sizes(v); },
         [](const Draft& d) { return sizes_text(d.target.center_classes); }},
        {"target.sigma", false, [](Draft& d, const std::string& v) { d.target.sigma = to_doubles(v); },
         [](const Draft& d) { return doubles_text(d.target.sigma); }},
        DOUBLE_KEY("target.radius", target.radius),
        DOUBLE_KEY("target.width", target.width),
        SIZE_KEY("target.cells", target.cells),
        DOUBLE_KEY("target.cell_size", target.cell_size),

        SIZE_KEY("train.classes_per_step", cfg.train.classes_per_step),
        SIZE_KEY("train.n_pos", cfg.train.n_pos),
        SIZE_KEY("train.n_neg", cfg.train.n_neg),
        SIZE_KEY("train.n_unc", cfg.train.n_unc),
        {"train.alpha", false, [](Draft& d, const std::string& v) { set_alpha(d.cfg.train, v); },
         [](const Draft& d) { return alpha_text(d.cfg.train); }},
        DOUBLE_KEY("train.alpha_max", cfg.train.alpha_max),

        SIZE_KEY("queue.class_capacity", cfg.train.queue_class_capacity),
        SIZE_KEY("queue.unc_capacity", cfg.train.queue_unc_capacity),
        SIZE_KEY("queue.push_per_step", cfg.train.push_per_step),

        {"drift.temperatures", false, [](Draft& d, const std::string& v) {
             d.cfg.train.drift.temperatures = to_doubles(v);
             d.cfg.train.drift.validate(0, 0);
         },
         [](const Draft& d) { return doubles_text(d.cfg.train.drift.temperatures); }},
        {"drift.normalization", false,
         [](Draft& d, const std::string& v) { d.cfg.train.drift.normalization = parse_normalization(v); },
         [](const Draft& d) { return std::string(to_string(d.cfg.train.drift.normalization)); }},
        {"drift.reduction", false,
         [](Draft& d, const std::string& v) { d.cfg.train.drift.reduction = parse_reduction(v); },
         [](const Draft& d) { return std::string(to_string(d.cfg.train.drift.reduction)); }},
        BOOL_KEY("drift.normalize_drift", cfg.train.drift.normalize_drift),
        DOUBLE_KEY("drift.attraction_scale", cfg.train.drift.attraction_scale),
        DOUBLE_KEY("drift.repulsion_scale", cfg.train.drift.repulsion_scale),

        {"features.maps", false, [](Draft& d, const std::string& v) { d.cfg.train.features = split(v, ','); },
         [](const Draft& d) {
             return join<std::string>(d.cfg.train.features, [](const std::string& s) { return s; });
         }},

        SIZE_KEY("gen.noise_dim", cfg.train.generator.noise_dim),
        {"gen.hidden", false, [](Draft& d, const std::string& v) { d.cfg.train.generator.hidden = to_sizes(v); },
         [](const Draft& d) { return sizes_text(d.cfg.train.generator.hidden); }},
        {"gen.activation", false,
         [](Draft& d, const std::string& v) { d.cfg.train.generator.activation = parse_activation(v); },
         [](const Draft& d) { return std::string(to_string(d.cfg.train.generator.activation)); }},
        SIZE_KEY("gen.class_embed_dim", cfg.train.generator.class_embed_dim),
        {"gen.alpha_embed", false,
         [](Draft& d, const std::string& v) { d.cfg.train.generator.alpha_embed = parse_alpha_embed(v); },
         [](const Draft& d) { return std::string(to_string(d.cfg.train.generator.alpha_embed)); }},
        {"gen.style_tokens", false,
         [](Draft& d, const std::string& v) {
             const std::size_t n = to_size(v);
             if (n == 0) {
                 d.cfg.train.generator.style.reset();
             } else {
                 d.cfg.train.generator.style = d.cfg.train.generator.style.value_or(StyleConfig{0, 64});
                 d.cfg.train.generator.style->tokens = n;
             }
         },
         [](const Draft& d) {
             return std::to_string(d.cfg.train.generator.style ? d.cfg.train.generator.style->tokens : 0);
         }},
        {"gen.style_vocab", false,
         [](Draft& d, const std::string& v) {
             auto& st = d.cfg.train.generator.style;
             if (st) st->vocab = to_size(v);
             else if (to_size(v) != 0) st = StyleConfig{0, to_size(v)};
         },
         [](const Draft& d) {
             return std::to_string(d.cfg.train.generator.style ? d.cfg.train.generator.style->vocab : 0);
         }},
        DOUBLE_KEY("gen.init_scale", cfg.train.generator.init_scale),
        DOUBLE_KEY("gen.output_weight_scale", cfg.train.generator.output_weight_scale),
        {"gen.output_bias", false,
         [](Draft& d, const std::string& v) {
             d.cfg.train.generator.output_bias = v.empty() ? std::vector<double>{} : to_doubles(v);
         },
         [](const Draft& d) { return doubles_text(d.cfg.train.generator.output_bias); }},

        DOUBLE_KEY("optim.lr", cfg.train.lr),
        DOUBLE_KEY("optim.beta1", cfg.train.beta1),
        DOUBLE_KEY("optim.beta2", cfg.train.beta2),
        DOUBLE_KEY("optim.eps", cfg.train.adam_eps),
        DOUBLE_KEY("optim.weight_decay", cfg.train.weight_decay),
        DOUBLE_KEY("ema.decay", cfg.train.ema_decay),
    };
    return table;
}

#undef SIZE_KEY
#undef DOUBLE_KEY
#undef BOOL_KEY

TargetSpec build_target(const TargetKeys& k) {
    TargetSpec t;
    t.family = parse_target_family(k.family);
    t.dim = k.dim;
    t.ring_radius = k.radius;
    t.ring_width = k.width;
    t.checker_cells = k.cells;
    t.checker_cell_size = k.cell_size;
    if (t.family == TargetFamily::GaussianMixture) {
        const std::size_t n = k.centers.size();
        if (!k.center_classes.empty() && k.center_classes.size() != n) {
            throw std::invalid_argument("target.center_classes needs one entry per center");
        }
        if (k.sigma.size() != 1 && k.sigma.size() != n) throw std::invalid_argument("target.sigma needs 1 or one per center");
        std::size_t n_classes = 1;
        for (std::size_t c : k.center_classes) n_classes = std::max(n_classes, c + 1);
        t.classes.assign(n_classes, {});
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t cls = k.center_classes.empty() ? 0 : k.center_classes[i];
            t.classes[cls].push_back({k.centers[i], k.sigma.size() == 1 ? k.sigma[0] : k.sigma[i]});
        }
    }
    t.validate();
    return t;
}

}  // namespace

ConfigDoc parse_config_text(const std::string& text, const std::string& source) {
    ConfigDoc doc;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(std::string_view(raw).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(source, line, "", "expected 'key = value'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        if (key.empty()) throw ConfigError(source, line, "", "empty key");
        if (doc.count(key)) throw ConfigError(source, line, key, "duplicate key (first on line " + std::to_string(doc[key].line) + ")");
        doc[key] = {trim(std::string_view(body).substr(eq + 1)), source, line};
    }
    return doc;
}

ConfigDoc load_config_file(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(path, 0, "", e.what());
    }
    return parse_config_text(text, path);
}

void apply_override(ConfigDoc& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("--set", 0, "", "expected key=value, got '" + assignment + "'");
    const std::string key = trim(std::string_view(assignment).substr(0, eq));
    if (key.empty()) throw ConfigError("--set", 0, "", "empty key");
    doc[key] = {trim(std::string_view(assignment).substr(eq + 1)), "--set", 0};
}

ExperimentConfig resolve_config(const ConfigDoc& doc) {
    const auto& table = key_table();
    std::set<std::string> known;
    for (const auto& k : table) known.insert(k.name);
    for (const auto& [key, entry] : doc) {
        if (!known.count(key)) throw ConfigError(entry.source, entry.line, key, "unknown key");
    }

    Draft d;
    for (const auto& k : table) {
        const auto it = doc.find(k.name);
        if (it == doc.end()) {
            if (k.required) throw ConfigError("config", 0, k.name, "required key is missing");
            continue;
        }
        try {
            k.set(d, it->second.value);
        } catch (const std::exception& e) {
            throw ConfigError(it->second.source, it->second.line, k.name, e.what());
        }
    }

    // Whole-config checks have no single line; anchor them at the family key.
    const ConfigEntry& anchor = doc.at("target.family");
    try {
        d.cfg.target = build_target(d.target);
        auto& gen = d.cfg.train.generator;
        gen.out_dim = d.cfg.target.dim;
        gen.n_classes = d.cfg.target.n_classes();
        if (gen.n_classes > 1 && gen.class_embed_dim == 0) gen.class_embed_dim = 8;
        d.cfg.train.validate();
    } catch (const std::exception& e) {
        throw ConfigError(anchor.source, 0, "", e.what());
    }
    if (d.cfg.out_dir.empty()) throw ConfigError("config", 0, "out.dir", "must not be empty");
    return d.cfg;
}

std::string resolved_config_text(const ExperimentConfig& config) {
    Draft d;
    d.cfg = config;
    const TargetSpec& t = config.target;
    d.target.family = std::string(to_string(t.family));
    d.target.dim = t.dim;
    d.target.radius = t.ring_radius;
    d.target.width = t.ring_width;
    d.target.cells = t.checker_cells;
    d.target.cell_size = t.checker_cell_size;
    if (t.family == TargetFamily::GaussianMixture) {
        d.target.centers.clear();
        d.target.sigma.clear();
        for (std::size_t c = 0; c < t.classes.size(); ++c) {
            for (const auto& comp : t.classes[c]) {
                d.target.centers.push_back(comp.center);
                d.target.center_classes.push_back(c);
                d.target.sigma.push_back(comp.sigma);
            }
        }
    }
    std::string out;
    for (const auto& k : key_table()) out += std::string(k.name) + " = " + k.get(d) + "\n";
    return out;
}

std::vector<std::string> known_config_keys() {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.push_back(k.name);
    return out;
}

}  // namespace drifting
