#include "eivreg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "eivreg/conditions.hpp"
#include "eivreg/datagen.hpp"
#include "eivreg/errors.hpp"
#include "eivreg/parallel.hpp"
#include "eivreg/random.hpp"
#include "eivreg/rates.hpp"
#include "eivreg/surrogate.hpp"

namespace eivreg {

using nlohmann::json;

namespace {

const char* error_tag(const std::exception& ex) {
    if (dynamic_cast<const NumericError*>(&ex)) return "NumericError";
    if (dynamic_cast<const DegenerateError*>(&ex)) return "DegenerateError";
    if (dynamic_cast<const ConstructionError*>(&ex)) return "ConstructionError";
    if (dynamic_cast<const DimensionError*>(&ex)) return "DimensionError";
    if (dynamic_cast<const DomainError*>(&ex)) return "DomainError";
    if (dynamic_cast<const ContractError*>(&ex)) return "ContractError";
    if (dynamic_cast<const Error*>(&ex)) return "Error";
    return "UnexpectedError";
}


constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return it->get<T>();
}

template <typename T>
T require(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(std::string("config: missing required key '") + key + "'");
    return it->get<T>();
}

StepRule parse_step_rule(const std::string& s) {
    if (s == "backtracking") return StepRule::Backtracking;
    if (s == "fixed") return StepRule::FixedReciprocalLipschitz;
    throw ConfigError("config: solver.step_rule must be 'backtracking' or 'fixed' (got '" + s + "')");
}

std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_p(double p) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", p);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

const std::vector<std::string>& core_columns() {
    static const std::vector<std::string> cols = {
        "replicate", "m",           "n",         "q",          "R_q",
        "sigma_w",   "sigma_e",     "kappa_c_emp", "kappa_l_emp", "deviation_inf",
        "l2_err_sq", "l1_err",      "iterations", "converged",  "seed_used"};
    return cols;
}

double group_field(const TrialRecord& r, const std::string& field) {
    if (field == "replicate") return r.replicate;
    if (field == "m") return static_cast<double>(r.m);
    if (field == "n") return static_cast<double>(r.n);
    if (field == "q") return r.q;
    if (field == "R_q") return r.R_q;
    if (field == "sigma_w") return r.sigma_w;
    if (field == "sigma_e") return r.sigma_e;
    throw AggregationError("aggregate: cannot group by '" + field + "'");
}

std::vector<std::pair<std::string, double>> metric_values(const TrialRecord& r) {
    return {{"kappa_c_emp", r.kappa_c_emp}, {"kappa_l_emp", r.kappa_l_emp},
            {"deviation_inf", r.deviation_inf}, {"l2_err_sq", r.l2_err_sq},
            {"l1_err", r.l1_err},             {"iterations", static_cast<double>(r.iterations)}};
}

double record_metric(const TrialRecord& r, const std::string& metric) {
    for (const auto& [name, value] : metric_values(r)) {
        if (name == metric) return value;
    }
    throw ReportError("rate_report: unknown metric '" + metric + "'");
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t m, std::size_t n, int rep) {
    TrialRecord rec;
    rec.replicate = rep;
    rec.m = m;
    rec.n = n;
    rec.q = cfg.q;
    rec.R_q = cfg.R_q;
    rec.sigma_w = cfg.noise.sigma_w();
    rec.sigma_e = cfg.noise.sigma_e();
    rec.seed_used = trial_seed(cfg.master_seed, m, n, rep);
    rec.kappa_c_emp = rec.kappa_l_emp = rec.deviation_inf = rec.l2_err_sq = rec.l1_err = kNaN;
    rec.lp_losses.assign(cfg.loss_ps.size(), kNaN);
    try {
        const SparsityBudget budget = cfg.budget();
        const Vector beta_star = generate_signal(SignalSpec{n, budget, signal_seed(cfg.master_seed, n, rep)});
        const Dataset data = generate_dataset(ProblemShape(m, n), cfg.noise, beta_star,
                                              rec.seed_used, false);
        const SurrogatePair pair = make_surrogates(data, cfg.noise.sigma_w2());

        rec.kappa_c_emp = column_norm_constant(data.Z);
        const ReProbeReport probe = re_probe(pair.gamma, budget, cfg.conditions.probes,
                                             hash64(rec.seed_used, {2}), ReProbeOptions{m, cfg.conditions.tau_c1});
        rec.kappa_l_emp = probe.kappa_l_hat;
        rec.deviation_inf = deviation_inf(pair, beta_star);

        SolverOptions solver = cfg.solver;
        solver.seed = hash64(rec.seed_used, {1, cfg.solver.seed});
        const Solution sol = solve(pair, budget, solver, cfg.projections);
        rec.iterations = sol.iterations;
        rec.converged = sol.converged;
        rec.l2_err_sq = lp_loss(sol.beta_hat, beta_star, 2.0);
        rec.l1_err = lp_loss(sol.beta_hat, beta_star, 1.0);
        for (std::size_t k = 0; k < cfg.loss_ps.size(); ++k) {
            rec.lp_losses[k] = lp_loss(sol.beta_hat, beta_star, cfg.loss_ps[k]);
        }
    } catch (const std::exception& ex) {
        rec.converged = false;
        rec.error = std::string(error_tag(ex)) + ": " + ex.what();
    }
    return rec;
}

json report_to_json(const RateReport& report) {
    json j;
    j["mode"] = report.mode == SweepMode::SweepM ? "sweep-m" : "sweep-n";
    j["metric"] = report.metric;
    j["q"] = report.q;
    j["constants"] = "up to constants";
    j["fits"] = json::array();
    for (const auto& f : report.fits) {
        json jf;
        jf[report.mode == SweepMode::SweepM ? "n" : "m"] = f.fixed_value;
        jf["slope"] = f.slope;
        jf["intercept"] = f.intercept;
        jf["r2"] = f.r2;
        jf["theoretical_exponent"] = f.theoretical;
        jf["points"] = json::array();
        for (const auto& [x, y] : f.points) jf["points"].push_back({x, y});
        j["fits"].push_back(jf);
    }
    return j;
}

}  // namespace

void ExperimentConfig::validate() const {
    (void)budget();
    if (m_grid.empty() || n_grid.empty()) throw ConfigError("config: m_grid and n_grid must be nonempty");
    for (auto m : m_grid)
        if (m < 1) throw ConfigError("config: every m must be at least 1");
    for (auto n : n_grid)
        if (n < 2) throw ConfigError("config: every n must be at least 2");
    if (replicates < 1) throw ConfigError("config: replicates must be at least 1");
    for (double p : loss_ps)
        if (!(p >= 1.0)) throw ConfigError("config: every loss p must be at least 1");
    if (conditions.probes < 1) throw ConfigError("config: conditions.probes must be at least 1");
    solver.validate();
    projections.validate();
}

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("config: invalid JSON: ") + ex.what());
    }
    ExperimentConfig cfg;
    try {
        reject_unknown(root,
                       {"q", "R_q", "m_grid", "n_grid", "noise", "replicates", "master_seed", "solver",
                        "projections", "loss_ps", "conditions"},
                       "config");
        cfg.q = require<double>(root, "q");
        cfg.R_q = require<double>(root, "R_q");
        cfg.m_grid = require<std::vector<std::size_t>>(root, "m_grid");
        cfg.n_grid = require<std::vector<std::size_t>>(root, "n_grid");
        const json& noise = root.at("noise");
        reject_unknown(noise, {"sigma_x2", "sigma_w2", "sigma_e2"}, "config.noise");
        cfg.noise = NoiseModel(require<double>(noise, "sigma_x2"), require<double>(noise, "sigma_w2"),
                               require<double>(noise, "sigma_e2"));
        cfg.replicates = require<int>(root, "replicates");
        cfg.master_seed = require<std::uint64_t>(root, "master_seed");
        if (root.contains("solver")) {
            const json& s = root["solver"];
            reject_unknown(s, {"max_iters", "step_rule", "conv_tol", "power_iters", "restarts", "seed"},
                           "config.solver");
            cfg.solver.max_iters = get_or(s, "max_iters", cfg.solver.max_iters);
            if (s.contains("step_rule")) cfg.solver.step_rule = parse_step_rule(s["step_rule"].get<std::string>());
            cfg.solver.conv_tol = get_or(s, "conv_tol", cfg.solver.conv_tol);
            cfg.solver.power_iters = get_or(s, "power_iters", cfg.solver.power_iters);
            cfg.solver.restarts = get_or(s, "restarts", cfg.solver.restarts);
            cfg.solver.seed = get_or(s, "seed", cfg.solver.seed);
        }
        if (root.contains("projections")) {
            const json& p = root["projections"];
            reject_unknown(p, {"feas_tol", "max_cycles", "bisect_tol"}, "config.projections");
            cfg.projections.feas_tol = get_or(p, "feas_tol", cfg.projections.feas_tol);
            cfg.projections.max_cycles = get_or(p, "max_cycles", cfg.projections.max_cycles);
            cfg.projections.bisect_tol = get_or(p, "bisect_tol", cfg.projections.bisect_tol);
        }
        cfg.loss_ps = get_or(root, "loss_ps", cfg.loss_ps);
        if (root.contains("conditions")) {
            const json& c = root["conditions"];
            reject_unknown(c, {"probes", "tau_c1"}, "config.conditions");
            cfg.conditions.probes = get_or(c, "probes", cfg.conditions.probes);
            cfg.conditions.tau_c1 = get_or(c, "tau_c1", cfg.conditions.tau_c1);
        }
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("config: ") + ex.what());
    } catch (const DomainError& ex) {
        throw ConfigError(std::string("config: ") + ex.what());
    }
    try {
        cfg.validate();
    } catch (const DomainError& ex) {
        throw ConfigError(std::string("config: ") + ex.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t m, std::size_t n, int replicate) {
    return hash64(master_seed, {m, n, static_cast<std::uint64_t>(replicate)});
}

std::uint64_t signal_seed(std::uint64_t master_seed, std::size_t n, int replicate) {
    // m = 0 never names a real trial, so this stream is disjoint from every trial seed.
    return hash64(master_seed, {0, n, static_cast<std::uint64_t>(replicate)});
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config, unsigned threads) {
    config.validate();
    struct Job {
        std::size_t m;
        std::size_t n;
        int rep;
    };
    std::vector<Job> jobs;
    for (auto m : config.m_grid)
        for (auto n : config.n_grid)
            for (int r = 0; r < config.replicates; ++r) jobs.push_back({m, n, r});
    std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
        return std::tie(a.m, a.n, a.rep) < std::tie(b.m, b.n, b.rep);
    });

    std::vector<TrialRecord> records(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t i) {
        records[i] = run_trial(config, jobs[i].m, jobs[i].n, jobs[i].rep);
    });
    return records;
}

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records, const std::vector<double>& loss_ps) {
    const auto& cols = core_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    for (double p : loss_ps) out << ",lp_loss_p" << fmt_p(p);
    out << ",error\n";
    for (const auto& r : records) {
        out << r.replicate << ',' << r.m << ',' << r.n << ',' << fmt17(r.q) << ',' << fmt17(r.R_q) << ','
            << fmt17(r.sigma_w) << ',' << fmt17(r.sigma_e) << ',' << fmt17(r.kappa_c_emp) << ','
            << fmt17(r.kappa_l_emp) << ',' << fmt17(r.deviation_inf) << ',' << fmt17(r.l2_err_sq) << ','
            << fmt17(r.l1_err) << ',' << r.iterations << ',' << (r.converged ? "true" : "false") << ','
            << r.seed_used;
        for (std::size_t k = 0; k < loss_ps.size(); ++k) {
            out << ',' << fmt17(k < r.lp_losses.size() ? r.lp_losses[k] : kNaN);
        }
        out << ',' << csv_escape(r.error) << '\n';
    }
}

std::string to_csv(const std::vector<TrialRecord>& records, const std::vector<double>& loss_ps) {
    std::ostringstream out;
    write_csv(out, records, loss_ps);
    return out.str();
}

std::vector<TrialRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("read_csv: empty input");
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < header.size(); ++i) pos[header[i]] = i;
    for (const auto& c : core_columns()) {
        if (!pos.count(c)) throw IoError("read_csv: missing column '" + c + "'");
    }
    std::vector<std::size_t> loss_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i].rfind("lp_loss_p", 0) == 0) loss_cols.push_back(i);
    }

    std::vector<TrialRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) {
            throw IoError("read_csv: line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                          " fields, expected " + std::to_string(header.size()));
        }
        const auto num = [&](const char* name) {
            const std::string& s = f[pos.at(name)];
            if (s == "nan") return kNaN;
            try {
                return std::stod(s);
            } catch (const std::exception&) {
                throw IoError("read_csv: line " + std::to_string(line_no) + ": bad value '" + s + "' for " + name);
            }
        };
        TrialRecord r;
        r.replicate = static_cast<int>(num("replicate"));
        r.m = static_cast<std::size_t>(num("m"));
        r.n = static_cast<std::size_t>(num("n"));
        r.q = num("q");
        r.R_q = num("R_q");
        r.sigma_w = num("sigma_w");
        r.sigma_e = num("sigma_e");
        r.kappa_c_emp = num("kappa_c_emp");
        r.kappa_l_emp = num("kappa_l_emp");
        r.deviation_inf = num("deviation_inf");
        r.l2_err_sq = num("l2_err_sq");
        r.l1_err = num("l1_err");
        r.iterations = static_cast<int>(num("iterations"));
        r.converged = f[pos.at("converged")] == "true";
        r.seed_used = std::stoull(f[pos.at("seed_used")]);
        for (std::size_t c : loss_cols) r.lp_losses.push_back(f[c] == "nan" ? kNaN : std::stod(f[c]));
        if (pos.count("error")) r.error = f[pos.at("error")];
        records.push_back(std::move(r));
    }
    return records;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) return kNaN;
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SummaryTable aggregate(const std::vector<TrialRecord>& records, const std::vector<std::string>& group_by) {
    if (records.empty()) throw AggregationError("aggregate: no records");
    std::map<std::vector<double>, std::vector<const TrialRecord*>> groups;
    for (const auto& r : records) {
        std::vector<double> key;
        for (const auto& field : group_by) key.push_back(group_field(r, field));
        groups[key].push_back(&r);
    }

    SummaryTable table;
    table.group_by = group_by;
    for (const auto& [key, members] : groups) {
        SummaryRow row;
        row.key = key;
        row.count = members.size();
        std::map<std::string, std::vector<double>> values;
        for (const TrialRecord* r : members) {
            if (r->failed()) {
                ++row.failures;
                continue;
            }
            for (const auto& [name, v] : metric_values(*r)) values[name].push_back(v);
        }
        row.failure_rate = static_cast<double>(row.failures) / static_cast<double>(row.count);
        for (const auto& [name, _] : metric_values(*members.front())) {
            const auto& vs = values[name];
            row.metrics[name] = MetricSummary{quantile(vs, 0.5), quantile(vs, 0.25), quantile(vs, 0.75)};
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

RateReport rate_report(const std::vector<TrialRecord>& records, SweepMode mode, const std::string& metric) {
    if (records.empty()) throw ReportError("rate_report: no records");
    if (metric != "l2_err_sq" && metric != "deviation_inf") {
        throw ReportError("rate_report: metric must be l2_err_sq or deviation_inf");
    }
    const double q = records.front().q;
    for (const auto& r : records) {
        if (r.q != q) throw ReportError("rate_report: records mix several values of q");
    }

    // fixed axis -> swept axis -> successful metric values
    std::map<std::size_t, std::map<std::size_t, std::vector<double>>> cells;
    for (const auto& r : records) {
        const std::size_t fixed = mode == SweepMode::SweepM ? r.n : r.m;
        const std::size_t swept = mode == SweepMode::SweepM ? r.m : r.n;
        auto& bucket = cells[fixed][swept];
        if (!r.failed()) bucket.push_back(record_metric(r, metric));
    }

    RateReport report{mode, metric, q, {}};
    const bool dev = metric == "deviation_inf";
    for (const auto& [fixed, sweep] : cells) {
        if (sweep.size() < 3) continue;
        RateFit fit{};
        fit.fixed_value = static_cast<double>(fixed);
        for (const auto& [swept, vals] : sweep) {
            const double m = static_cast<double>(mode == SweepMode::SweepM ? swept : fixed);
            const double n = static_cast<double>(mode == SweepMode::SweepM ? fixed : swept);
            const double ratio = std::log(n) / m;
            fit.points.emplace_back(dev ? std::sqrt(ratio) : ratio, quantile(vals, 0.5));
        }
        PowerLawFit plf{};
        try {
            plf = fit_rate_exponent(fit.points);
        } catch (const FitError& ex) {
            throw ReportError(std::string("rate_report: ") + ex.what());
        }
        fit.slope = plf.slope;
        fit.intercept = plf.intercept;
        fit.r2 = plf.r2;
        fit.theoretical = dev ? 1.0 : 1.0 - q / 2.0;
        report.fits.push_back(std::move(fit));
    }
    if (report.fits.empty()) {
        throw ReportError("rate_report: need at least 3 distinct values on the swept axis");
    }
    return report;
}

std::string format_report_text(const RateReport& report) {
    std::ostringstream out;
    const bool sweep_m = report.mode == SweepMode::SweepM;
    out << "rate report (" << (sweep_m ? "sweep-m" : "sweep-n") << ", metric " << report.metric
        << ", q = " << fmt_p(report.q) << "; levels up to constants)\n";
    for (const auto& f : report.fits) {
        out << "  " << (sweep_m ? "n = " : "m = ") << fmt_p(f.fixed_value) << ": slope " << fmt17(f.slope)
            << "  r2 " << fmt17(f.r2) << "  theoretical " << fmt_p(f.theoretical) << "  ("
            << f.points.size() << " points)\n";
    }
    return out.str();
}

std::string format_report_json(const RateReport& report) { return report_to_json(report).dump(); }

SweepMode parse_sweep_mode(const std::string& text) {
    if (text == "sweep-m") return SweepMode::SweepM;
    if (text == "sweep-n") return SweepMode::SweepN;
    throw ConfigError("mode must be sweep-m or sweep-n (got '" + text + "')");
}

}  // namespace eivreg
