#include "tergm/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>

#include "tergm/estimation.hpp"
#include "tergm/io.hpp"
#include "tergm/util.hpp"

namespace tergm {

namespace {

using nlohmann::json;

std::string resolve(const std::string& base_dir, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

AttrType attr_type_from(const std::string& s) {
    if (s == "numeric") return AttrType::Numeric;
    if (s == "binary") return AttrType::Binary;
    if (s == "categorical") return AttrType::Categorical;
    throw Error("unknown attribute type '" + s + "' (numeric, binary, categorical)");
}

SharedPartnerRule sp_rule_from(const std::string& s) {
    if (s == "outgoing" || s == "otp") return SharedPartnerRule::OutgoingTwoPath;
    if (s == "incoming" || s == "itp") return SharedPartnerRule::IncomingTwoPath;
    throw Error("unknown shared_partners rule '" + s + "' (outgoing, incoming)");
}

// finds the declared schema, or null
const AttributeSchema* find_schema(const std::vector<AttributeSchema>& schemas,
                                   const std::string& name) {
    for (const auto& s : schemas)
        if (s.name == name) return &s;
    return nullptr;
}

ModelTerm parse_term(const json& j, const std::vector<AttributeSchema>& schemas,
                     std::vector<MixingReference>* exclusions);

std::vector<ModelTerm> parse_terms(const json& arr, const std::vector<AttributeSchema>& schemas,
                                   std::vector<MixingReference>* exclusions) {
    std::vector<ModelTerm> out;
    for (const auto& j : arr) {
        if (j.contains("kind") && j.at("kind") == "mixing") {
            // sugar: expands to the L^2 - 1 indicators around the reference
            std::string attr = j.at("attr");
            const AttributeSchema* schema = find_schema(schemas, attr);
            if (!schema)
                throw Error("mixing term references undeclared attribute '" + attr + "'");
            auto ref = j.at("reference");
            std::pair<std::string, std::string> reference{ref.at(0), ref.at(1)};
            auto expanded = mixing_terms_from_attribute(*schema, reference);
            out.insert(out.end(), expanded.begin(), expanded.end());
            if (exclusions)
                exclusions->push_back({attr, reference.first, reference.second});
        } else {
            out.push_back(parse_term(j, schemas, exclusions));
        }
    }
    return out;
}

ModelTerm parse_term(const json& j, const std::vector<AttributeSchema>& schemas,
                     std::vector<MixingReference>* exclusions) {
    std::string kind = j.at("kind");
    ModelTerm t;
    if (kind == "edges") {
        t = ModelTerm::edges();
    } else if (kind == "reciprocity") {
        t = ModelTerm::reciprocity();
    } else if (kind == "gw_out_degree") {
        t = ModelTerm::gw_out_degree(j.value("decay", 0.5));
    } else if (kind == "gw_in_degree") {
        t = ModelTerm::gw_in_degree(j.value("decay", 0.5));
    } else if (kind == "gwesp") {
        t = ModelTerm::gwesp(j.value("decay", 0.5),
                             sp_rule_from(j.value("shared_partners", "outgoing")));
    } else if (kind == "sender") {
        t = ModelTerm::sender_attr(j.at("attr"));
    } else if (kind == "receiver") {
        t = ModelTerm::receiver_attr(j.at("attr"));
    } else if (kind == "match") {
        t = ModelTerm::match(j.at("attr"));
    } else if (kind == "absdiff") {
        t = ModelTerm::absdiff(j.at("attr"));
    } else if (kind == "node_mix") {
        t = ModelTerm::node_mix(j.at("attr"), j.at("sender_level"), j.at("receiver_level"));
    } else if (kind == "dyad_cov") {
        t = ModelTerm::dyad_cov(j.at("cov"));
    } else if (kind == "period_cov") {
        std::vector<double> values = j.at("values").get<std::vector<double>>();
        t = ModelTerm::period_cov(std::move(values), j.value("name", ""));
    } else if (kind == "interaction") {
        auto ops = j.at("of");
        if (!ops.is_array() || ops.size() != 2)
            throw Error("interaction term needs exactly two operands under 'of'");
        auto parsed = parse_terms(ops, schemas, exclusions);
        if (parsed.size() != 2)
            throw Error("interaction operands cannot be mixing expansions");
        t = ModelTerm::interaction(parsed[0], parsed[1], j.value("name", ""));
    } else {
        throw Error("unknown term kind '" + kind + "'");
    }
    if (j.contains("name")) t.label = j.at("name");
    if (t.label.empty()) t.label = t.default_label();
    return t;
}

SideSelector parse_side(const json& j) {
    SideSelector side;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_string()) {
            side.equals.emplace_back(it.key(), it.value().get<std::string>());
        } else if (it.value().is_array() && it.value().size() == 2) {
            side.ranges.emplace_back(it.key(), it.value().at(0).get<double>(),
                                     it.value().at(1).get<double>());
        } else {
            throw Error("selector entry '" + it.key() +
                        "' must be a level string or a [lo, hi] range");
        }
    }
    return side;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("config " + path + " is not valid JSON: " + e.what());
    }

    RunConfig cfg;
    cfg.config_path = path;
    cfg.base_dir = std::filesystem::path(path).parent_path().string();
    if (cfg.base_dir.empty()) cfg.base_dir = ".";

    try {
        cfg.schema_version = j.value("schema_version", 1);

        if (j.contains("inputs")) {
            const auto& in_j = j.at("inputs");
            if (in_j.contains("edges")) cfg.edges_path = resolve(cfg.base_dir, in_j.at("edges"));
            if (in_j.contains("attributes"))
                cfg.attributes_path = resolve(cfg.base_dir, in_j.at("attributes"));
            if (in_j.contains("dyad_covariates"))
                for (const auto& p : in_j.at("dyad_covariates"))
                    cfg.dyad_cov_paths.push_back(resolve(cfg.base_dir, p));
        }
        cfg.threshold = j.value("threshold", 0);
        cfg.memory_order = j.value("memory_order", 0);
        cfg.output_dir = j.value("output_dir", "out");
        cfg.workers = j.value("workers", 1);

        if (j.contains("attributes"))
            for (const auto& a : j.at("attributes")) {
                AttributeSchema schema;
                schema.name = a.at("name");
                schema.type = attr_type_from(a.at("type"));
                if (a.contains("levels"))
                    schema.levels = a.at("levels").get<std::vector<std::string>>();
                cfg.attribute_schemas.push_back(std::move(schema));
            }

        if (j.contains("simulate")) {
            const auto& s = j.at("simulate");
            cfg.simulate.enabled = true;
            cfg.simulate.n = s.at("n");
            cfg.simulate.periods = s.at("periods");
            if (s.contains("seed")) {
                cfg.simulate.seed = s.at("seed").get<std::uint64_t>();
                cfg.simulate.seed_set = true;
            }
            cfg.simulate.burn_in = s.value("burn_in", 200);
            cfg.simulate.thinning = s.value("thinning", 10);
            if (s.contains("theta"))
                for (auto it = s.at("theta").begin(); it != s.at("theta").end(); ++it)
                    cfg.simulate.theta[it.key()] = it.value().get<double>();
            if (s.contains("attribute_generator")) {
                const auto& gen = s.at("attribute_generator");
                if (gen.contains("categorical"))
                    for (const auto& c : gen.at("categorical"))
                        cfg.simulate.attribute_generator.categorical.push_back(
                            {c.at("name"), c.at("levels").get<std::vector<std::string>>(),
                             c.at("shares").get<std::vector<double>>()});
                if (gen.contains("numeric"))
                    for (const auto& c : gen.at("numeric"))
                        cfg.simulate.attribute_generator.numeric.push_back(
                            {c.at("name"), c.value("lo", 0.0), c.value("hi", 1.0)});
            }
            // generated attributes double as declarations for terms/selectors
            for (const auto& c : cfg.simulate.attribute_generator.categorical)
                cfg.attribute_schemas.push_back({c.name, AttrType::Categorical, c.levels});
            for (const auto& c : cfg.simulate.attribute_generator.numeric)
                cfg.attribute_schemas.push_back({c.name, AttrType::Numeric, {}});
        }

        if (j.contains("model"))
            cfg.model.terms = parse_terms(j.at("model").at("terms"), cfg.attribute_schemas,
                                          &cfg.model.reference_exclusions);

        if (j.contains("fit")) {
            const auto& f = j.at("fit");
            cfg.fit.enabled = true;
            if (f.contains("bootstrap")) {
                cfg.fit.bootstrap = f.at("bootstrap");
                cfg.fit.bootstrap_set = true;
            }
            if (f.contains("seed")) {
                cfg.fit.seed = f.at("seed").get<std::uint64_t>();
                cfg.fit.seed_set = true;
            }
            cfg.fit.tolerance = f.value("tolerance", 1e-8);
            cfg.fit.max_iterations = f.value("max_iterations", 100);
        }

        if (j.contains("analysis")) {
            const auto& a = j.at("analysis");
            if (a.contains("mixing"))
                for (const auto& m : a.at("mixing"))
                    cfg.mixing.push_back({m.at("attr"), m.value("period", "all"),
                                          m.value("self_exclusion", false)});
            if (a.contains("probability"))
                for (const auto& p : a.at("probability")) {
                    ProbabilityRequest req;
                    req.name = p.at("name");
                    req.period = p.value("period", "all");
                    req.m = p.value("m", 0);
                    req.seed = p.value("seed", 0);
                    req.per_period = p.value("per_period", false);
                    if (p.contains("sender")) req.sender = parse_side(p.at("sender"));
                    if (p.contains("receiver")) req.receiver = parse_side(p.at("receiver"));
                    cfg.probability.push_back(std::move(req));
                }
            if (a.contains("deciles"))
                for (const auto& d : a.at("deciles")) {
                    DecileRequest req;
                    req.name = d.at("name");
                    req.period = d.at("period");
                    req.attr = d.at("attr");
                    req.m = d.value("m", 0);
                    req.seed = d.value("seed", 0);
                    if (d.contains("receiver")) req.receiver = parse_side(d.at("receiver"));
                    cfg.deciles.push_back(std::move(req));
                }
        }
    } catch (const json::exception& e) {
        throw Error("config " + path + ": " + e.what());
    }
    return cfg;
}

namespace {

void check_selector(const SideSelector& side, const std::vector<AttributeSchema>& schemas,
                    const std::string& where, std::vector<Diagnostic>& out) {
    for (const auto& [attr, level] : side.equals) {
        const AttributeSchema* s = find_schema(schemas, attr);
        if (!s) {
            out.push_back({Diagnostic::Severity::Error,
                           where + ": selector references undeclared attribute '" + attr + "'"});
            continue;
        }
        if (s->type != AttrType::Categorical)
            out.push_back({Diagnostic::Severity::Error,
                           where + ": selector equality on non-categorical attribute '" + attr +
                               "'"});
        else if (s->level_index(level) < 0)
            out.push_back({Diagnostic::Severity::Error, where + ": '" + level +
                                                            "' is not a level of '" + attr + "'"});
    }
    for (const auto& [attr, lo, hi] : side.ranges) {
        const AttributeSchema* s = find_schema(schemas, attr);
        if (!s)
            out.push_back({Diagnostic::Severity::Error,
                           where + ": selector references undeclared attribute '" + attr + "'"});
        else if (s->type == AttrType::Categorical)
            out.push_back({Diagnostic::Severity::Error,
                           where + ": selector range on categorical attribute '" + attr + "'"});
        if (lo > hi)
            out.push_back({Diagnostic::Severity::Error,
                           where + ": selector range on '" + attr + "' has lo > hi"});
    }
}

void collect_dyad_cov_names(const ModelTerm& t, std::set<std::string>& out) {
    if (t.kind == TermKind::DyadCov) out.insert(t.cov);
    for (const auto& op : t.operands) collect_dyad_cov_names(op, out);
}

bool is_lag_name(const std::string& name) {
    if (name.rfind("lag", 0) != 0 || name.size() == 3) return false;
    try {
        parse_int(name.substr(3));
    } catch (const Error&) {
        return false;
    }
    return true;
}

void check_term_refs(const ModelTerm& t, const RunConfig& cfg, std::vector<Diagnostic>& out) {
    auto need_attr = [&](AttrType wanted, bool allow_numeric_family) {
        const AttributeSchema* s = find_schema(cfg.attribute_schemas, t.attr);
        if (!s) {
            out.push_back({Diagnostic::Severity::Error,
                           "term '" + t.name() + "' references undeclared attribute '" + t.attr +
                               "'"});
            return;
        }
        if (wanted == AttrType::Categorical && s->type != AttrType::Categorical)
            out.push_back({Diagnostic::Severity::Error,
                           "term '" + t.name() + "' needs categorical attribute '" + t.attr +
                               "'"});
        if (wanted == AttrType::Numeric && allow_numeric_family &&
            s->type == AttrType::Categorical)
            out.push_back({Diagnostic::Severity::Error,
                           "term '" + t.name() + "' needs a numeric or binary attribute, '" +
                               t.attr + "' is categorical"});
    };
    switch (t.kind) {
        case TermKind::SenderAttr:
        case TermKind::ReceiverAttr:
        case TermKind::AbsDiff:
            need_attr(AttrType::Numeric, true);
            break;
        case TermKind::Match: {
            const AttributeSchema* s = find_schema(cfg.attribute_schemas, t.attr);
            if (!s)
                out.push_back({Diagnostic::Severity::Error,
                               "term '" + t.name() + "' references undeclared attribute '" +
                                   t.attr + "'"});
            break;
        }
        case TermKind::NodeMix: {
            const AttributeSchema* s = find_schema(cfg.attribute_schemas, t.attr);
            if (!s) {
                out.push_back({Diagnostic::Severity::Error,
                               "term '" + t.name() + "' references undeclared attribute '" +
                                   t.attr + "'"});
            } else if (s->type != AttrType::Categorical) {
                out.push_back({Diagnostic::Severity::Error,
                               "term '" + t.name() + "' needs categorical attribute '" + t.attr +
                                   "'"});
            } else {
                if (s->level_index(t.sender_level) < 0)
                    out.push_back({Diagnostic::Severity::Error,
                                   "term '" + t.name() + "': '" + t.sender_level +
                                       "' is not a declared level of '" + t.attr + "'"});
                if (s->level_index(t.receiver_level) < 0)
                    out.push_back({Diagnostic::Severity::Error,
                                   "term '" + t.name() + "': '" + t.receiver_level +
                                       "' is not a declared level of '" + t.attr + "'"});
            }
            break;
        }
        case TermKind::DyadCov: {
            bool is_lag = t.cov.rfind("lag", 0) == 0;
            if (is_lag) {
                int k = 0;
                try {
                    k = static_cast<int>(parse_int(t.cov.substr(3)));
                } catch (const Error&) {
                    is_lag = false;
                }
                if (is_lag && k > cfg.memory_order)
                    out.push_back({Diagnostic::Severity::Error,
                                   "term '" + t.name() + "' uses '" + t.cov +
                                       "' but memory_order is " +
                                       std::to_string(cfg.memory_order)});
            }
            break;
        }
        case TermKind::Interaction:
            for (const auto& op : t.operands) check_term_refs(op, cfg, out);
            break;
        default:
            break;
    }
}

}  // namespace

std::vector<Diagnostic> validate(const RunConfig& cfg) {
    std::vector<Diagnostic> out;
    auto error = [&](const std::string& msg) {
        out.push_back({Diagnostic::Severity::Error, msg});
    };
    auto warning = [&](const std::string& msg) {
        out.push_back({Diagnostic::Severity::Warning, msg});
    };

    if (cfg.schema_version != 1)
        error("unsupported schema_version " + std::to_string(cfg.schema_version));
    if (cfg.threshold < 0) error("threshold must be nonnegative");
    if (cfg.memory_order < 0) error("memory_order must be nonnegative");
    if (cfg.workers < 1) error("workers must be at least 1");

    if (cfg.simulate.enabled && !cfg.edges_path.empty())
        error("config declares both file inputs and a simulate section; pick one");
    if (!cfg.simulate.enabled && cfg.edges_path.empty())
        error("config needs either inputs.edges or a simulate section");

    // attribute declarations
    std::set<std::string> names;
    for (const auto& s : cfg.attribute_schemas) {
        if (!names.insert(s.name).second) error("attribute '" + s.name + "' declared twice");
        if (s.type == AttrType::Categorical && s.levels.empty())
            error("categorical attribute '" + s.name + "' has no levels");
    }

    // model
    if (cfg.model.terms.empty()) {
        error("model has no terms");
    } else {
        try {
            cfg.model.validate();
        } catch (const Error& e) {
            error(e.what());
        }
        for (const auto& t : cfg.model.terms) check_term_refs(t, cfg, out);
    }

    if (cfg.fit.enabled) {
        if (!cfg.fit.bootstrap_set)
            error("fit requested without 'bootstrap' (the replicate count B)");
        else if (cfg.fit.bootstrap < 1)
            error("fit.bootstrap must be at least 1");
        if (!cfg.fit.seed_set) error("fit requested without 'seed'");
        if (cfg.fit.tolerance <= 0) error("fit.tolerance must be positive");
    }

    if (cfg.simulate.enabled) {
        if (cfg.simulate.n < 2) error("simulate.n must be at least 2");
        if (cfg.simulate.periods < 1) error("simulate.periods must be at least 1");
        if (!cfg.simulate.seed_set) error("simulate requested without 'seed'");
        if (cfg.memory_order >= cfg.simulate.periods)
            error("memory_order " + std::to_string(cfg.memory_order) +
                  " needs more than " + std::to_string(cfg.simulate.periods) +
                  " simulated period(s)");
        std::set<std::string> cov_names;
        for (const auto& t : cfg.model.terms) collect_dyad_cov_names(t, cov_names);
        for (const auto& name : cov_names)
            if (!is_lag_name(name))
                error("simulated panels cannot supply dyad covariate '" + name +
                      "' (only lag1..lagK are available)");
        for (const auto& t : cfg.model.terms)
            if (!cfg.simulate.theta.count(t.name()))
                error("simulate.theta is missing a value for term '" + t.name() + "'");
        for (const auto& [name, v] : cfg.simulate.theta) {
            (void)v;
            bool known = false;
            for (const auto& t : cfg.model.terms)
                if (t.name() == name) known = true;
            if (!known) warning("simulate.theta names unknown term '" + name + "'");
        }
        for (const auto& c : cfg.simulate.attribute_generator.categorical)
            if (c.levels.size() != c.shares.size() || c.levels.empty())
                error("attribute generator '" + c.name + "': levels and shares must align");
    }

    for (const auto& m : cfg.mixing) {
        const AttributeSchema* s = find_schema(cfg.attribute_schemas, m.attr);
        if (!s)
            error("mixing request references undeclared attribute '" + m.attr + "'");
        else if (s->type != AttrType::Categorical)
            error("mixing request needs categorical attribute '" + m.attr + "'");
    }
    for (const auto& p : cfg.probability) {
        if (!cfg.fit.enabled)
            error("probability request '" + p.name + "' needs a fit section");
        check_selector(p.sender, cfg.attribute_schemas, "probability '" + p.name + "' sender",
                       out);
        check_selector(p.receiver, cfg.attribute_schemas, "probability '" + p.name + "' receiver",
                       out);
        if (p.m < 0) error("probability '" + p.name + "': m must be nonnegative");
    }
    for (const auto& d : cfg.deciles) {
        if (!cfg.fit.enabled) error("decile request '" + d.name + "' needs a fit section");
        const AttributeSchema* s = find_schema(cfg.attribute_schemas, d.attr);
        if (!s)
            error("decile request '" + d.name + "' references undeclared attribute '" + d.attr +
                  "'");
        else if (s->type == AttrType::Categorical)
            error("decile request '" + d.name + "' needs a numeric attribute");
        check_selector(d.receiver, cfg.attribute_schemas, "deciles '" + d.name + "' receiver",
                       out);
        if (d.period == "all") error("decile request '" + d.name + "' needs a single period");
    }

    if (has_errors(out) || cfg.simulate.enabled) return out;

    // data-dependent checks: best effort, problems become diagnostics
    try {
        auto edges = read_edge_list(cfg.edges_path);
        AttributeTable attrs;
        if (!cfg.attributes_path.empty())
            attrs = read_attributes(cfg.attributes_path, cfg.attribute_schemas);
        else
            for (const auto& s : cfg.attribute_schemas) attrs.declare(s);
        std::vector<DyadCovRow> cov_rows;
        for (const auto& path : cfg.dyad_cov_paths) {
            auto rows = read_dyad_covariates(path);
            cov_rows.insert(cov_rows.end(), rows.begin(), rows.end());
        }
        IngestResult ingest = assemble_panel(edges, std::move(attrs), cov_rows, cfg.memory_order);
        for (const auto& w : ingest.warnings) warning(w);
        PanelNetwork panel = ingest.panel.thresholded(cfg.threshold);

        // every dyad-covariate term must resolve against the ingested data
        // (or be a lag matrix within the memory order)
        std::set<std::string> needed;
        for (const auto& t : cfg.model.terms) collect_dyad_cov_names(t, needed);
        for (const auto& name : needed) {
            if (is_lag_name(name)) continue;  // range checked structurally
            if (!panel.dyad_covariates().count(name))
                error("term references dyad covariate '" + name +
                      "' which appears in no dyad-covariate file");
        }

        for (const auto& m : cfg.mixing) {
            if (m.period != "all" && panel.period_index(m.period) < 0) {
                error("mixing request names unknown period '" + m.period + "'");
                continue;
            }
            // pooled cell counts; cells with fewer than 5 observed ties are
            // too sparse to say much about
            const AttributeSchema& schema = *find_schema(cfg.attribute_schemas, m.attr);
            auto L = schema.levels.size();
            std::vector<std::vector<long long>> counts(L, std::vector<long long>(L, 0));
            for (int t : panel.modeled_periods()) {
                if (m.period != "all" && panel.period(t).label != m.period) continue;
                Covariates covs = covariates_for_period(panel, t);
                auto it = covs.categorical.find(m.attr);
                if (it == covs.categorical.end()) continue;
                const auto& col = it->second.value;
                const DirectedGraph& g = *panel.period(t).binary;
                for (int i = 0; i < g.size(); ++i)
                    for (int j = 0; j < g.size(); ++j) {
                        if (i == j || !g.edge(i, j)) continue;
                        int a = col[static_cast<std::size_t>(i)];
                        int b = col[static_cast<std::size_t>(j)];
                        if (a >= 0 && b >= 0)
                            ++counts[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                    }
            }
            for (std::size_t a = 0; a < L; ++a)
                for (std::size_t b = 0; b < L; ++b)
                    if (counts[a][b] < 5)
                        warning("mixing cell " + schema.levels[a] + " -> " + schema.levels[b] +
                                " of '" + m.attr + "' has only " + std::to_string(counts[a][b]) +
                                " observed tie(s)");
        }
        for (const auto& p : cfg.probability)
            if (p.period != "all" && panel.period_index(p.period) < 0)
                error("probability request '" + p.name + "' names unknown period '" + p.period +
                      "'");
        for (const auto& d : cfg.deciles)
            if (panel.period_index(d.period) < 0)
                error("decile request '" + d.name + "' names unknown period '" + d.period + "'");
    } catch (const Error& e) {
        error(e.what());
    }
    return out;
}

}  // namespace tergm
