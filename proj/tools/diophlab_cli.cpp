// Command-line front end: one subcommand per library operation plus the
// experiment pipelines.  Exit codes: 0 ok, 1 counterexample/assertion found,
// 2 configuration error, 3 enumeration budget exceeded.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "diophlab/diophlab.hpp"

using namespace diophlab;

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// "family C a b", "const v", table file via "@path"
ApproxFunction parse_psi(const std::string& s) {
    if (!s.empty() && s[0] == '@') {
        std::ifstream f(s.substr(1));
        if (!f) throw ConfigError("cannot open approx function file: " + s.substr(1));
        std::stringstream ss;
        ss << f.rdbuf();
        return ApproxFunction::parse(ss.str());
    }
    std::istringstream is(s);
    std::string head;
    is >> head;
    if (head == "const") {
        double v;
        is >> v;
        return ApproxFunction::constant(v);
    }
    return ApproxFunction::parse(s + "\n");
}

// builtin name, or "@path" for a chart definition file
Chart chart_from_arg(const std::string& name) {
    if (!name.empty() && name[0] == '@') {
        std::ifstream f(name.substr(1));
        if (!f) throw ConfigError("cannot open chart file: " + name.substr(1));
        std::stringstream ss;
        ss << f.rdbuf();
        return parse_chart_file(ss.str(), name.substr(1));
    }
    return make_chart(name);
}

MatQ read_matrix(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open matrix file: " + path);
    std::vector<std::vector<Rat>> rows;
    std::string line;
    while (std::getline(f, line)) {
        std::istringstream is(line);
        std::string tok;
        std::vector<Rat> row;
        while (is >> tok) row.push_back(parse_rat(tok));
        if (!row.empty()) rows.push_back(row);
    }
    MatQ m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw ConfigError("matrix file is not square");
        for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Box make_box(const Chart& chart, const std::string& center, const std::string& radii) {
    if (center.empty()) {
        std::vector<double> c(chart.d()), r(chart.d());
        for (std::size_t i = 0; i < chart.d(); ++i) {
            c[i] = 0.5 * (chart.domain().lo[i] + chart.domain().hi[i]);
            r[i] = 0.5 * (chart.domain().hi[i] - chart.domain().lo[i]);
        }
        return Box(c, r);
    }
    return Box(parse_list(center), parse_list(radii));
}

void emit(const Report& rep, const std::string& out, const std::string& format) {
    std::ostringstream buf;
    if (format == "json-lines")
        rep.write_jsonl(buf);
    else
        rep.write_csv(buf);
    if (out.empty()) {
        std::cout << buf.str();
    } else {
        std::ofstream f(out, std::ios::binary);
        f << buf.str();
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale experiments on weighted rational approximation near manifolds"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string out_path, format = "csv";
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--threads", threads, "worker count (results are worker-count independent)");
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--format", format, "csv or json-lines")
        ->check(CLI::IsMember({"csv", "json-lines"}));

    std::string chart_name = "parabola", box_center, box_radii, matrix_path, x_str;
    std::string eps_str, epsp_str, K_str, T_str, psi_all, config_path;
    std::vector<std::string> psi_list;
    double Q = 100, c = 0.5, delta = 0.1, E = 1.0, alpha = 0.0, rball = 1.0, M_bound = -1.0;
    double s_prime = 0.5, w0 = 3.0, measure = 1.0, k0 = 0.25;
    long long t = 3, horizon = 1000, t_max = 6, k = 2, grid = 50, q_max = 100000;
    int l_order = 2;
    long long dcount = 1;
    bool dump_witnesses = false;

    auto add_chart = [&](CLI::App* sc) { sc->add_option("--chart", chart_name, "builtin chart name, or @file for a definition"); };
    auto add_box = [&](CLI::App* sc) {
        sc->add_option("--box-center", box_center, "box center (comma list)");
        sc->add_option("--box-radii", box_radii, "box radii (comma list)");
    };

    auto* sc_count_r = app.add_subcommand("count-r", "count rational points near the chart");
    add_chart(sc_count_r);
    add_box(sc_count_r);
    sc_count_r->add_option("--Q", Q)->required();
    sc_count_r->add_option("--eps", eps_str, "dependent-coordinate windows")->required();
    sc_count_r->add_flag("--witnesses", dump_witnesses, "dump witness rows");

    auto* sc_count_n = app.add_subcommand("count-n", "count (p,q) with windows meeting a box");
    add_chart(sc_count_n);
    add_box(sc_count_n);
    sc_count_n->add_option("--eps", eps_str, "per-coordinate windows")->required();
    sc_count_n->add_option("--t", t)->required();

    auto* sc_minima = app.add_subcommand("minima", "successive minima of a lattice");
    sc_minima->add_option("--matrix", matrix_path, "text rows; rows are the generators")
        ->required();
    sc_minima->add_option("--k", k, "how many minima");

    auto* sc_dual = app.add_subcommand("dual", "dual matrix under the long Weyl element");
    sc_dual->add_option("--matrix", matrix_path)->required();

    auto* sc_good = app.add_subcommand("good-set", "good-set membership at a point");
    add_chart(sc_good);
    sc_good->add_option("--x", x_str)->required();
    sc_good->add_option("--c", c);
    sc_good->add_option("--Q", Q);
    sc_good->add_option("--eps", eps_str)->required();
    sc_good->add_option("--eps-prime", epsp_str);

    auto* sc_minor = app.add_subcommand("minor-set", "minor-set membership at a point");
    add_chart(sc_minor);
    sc_minor->add_option("--x", x_str)->required();
    sc_minor->add_option("--t", t);
    sc_minor->add_option("--eps", eps_str)->required();
    sc_minor->add_option("--eps-prime", epsp_str);

    auto* sc_sf = app.add_subcommand("sf", "small-dual-form witness search at a point");
    add_chart(sc_sf);
    sc_sf->add_option("--x", x_str)->required();
    sc_sf->add_option("--delta", delta)->required();
    sc_sf->add_option("--K", K_str)->required();
    sc_sf->add_option("--T", T_str)->required();

    auto* sc_bkm = app.add_subcommand("bkm-bound", "quantitative nondivergence bound");
    sc_bkm->add_option("--delta", delta)->required();
    sc_bkm->add_option("--K", K_str)->required();
    sc_bkm->add_option("--T", T_str)->required();
    sc_bkm->add_option("--E", E);
    sc_bkm->add_option("--alpha", alpha);
    sc_bkm->add_option("--l", l_order);
    sc_bkm->add_option("--r", rball);
    sc_bkm->add_option("--d", dcount);
    sc_bkm->add_option("--measure", measure);

    auto* sc_project = app.add_subcommand("project", "project a good-set point to a witness");
    add_chart(sc_project);
    sc_project->add_option("--x", x_str)->required();
    sc_project->add_option("--c", c);
    sc_project->add_option("--Q", Q);
    sc_project->add_option("--eps", eps_str)->required();
    sc_project->add_option("--eps-prime", epsp_str);
    sc_project->add_option("--M", M_bound, "second-derivative bound (default: certified)");

    auto* sc_reg = app.add_subcommand("regularize", "chain-preserving product lift");
    sc_reg->add_option("--psi", psi_list, "approximation functions (chain order)")->required();
    sc_reg->add_option("--phi", psi_all, "target lower envelope")->required();
    sc_reg->add_option("--horizon", horizon);

    auto* sc_split = app.add_subcommand("split", "permutation splitting of a weight system");
    sc_split->add_option("--psi", psi_list)->required();
    sc_split->add_option("--horizon", horizon);

    auto* sc_sched = app.add_subcommand("schedule", "divergence schedule");
    sc_sched->add_option("--psi", psi_list)->required();
    sc_sched->add_option("--s-prime", s_prime);
    sc_sched->add_option("--t-max", t_max);

    auto* sc_ubiq = app.add_subcommand("ubiquity", "ubiquity density pipeline");
    add_chart(sc_ubiq);
    add_box(sc_ubiq);
    sc_ubiq->add_option("--psi", psi_list)->required();
    sc_ubiq->add_option("--s-prime", s_prime);
    sc_ubiq->add_option("--t-max", t_max);
    sc_ubiq->add_option("--c", c);
    sc_ubiq->add_option("--k0", k0);
    sc_ubiq->add_option("--grid", grid);
    sc_ubiq->add_option("--samples", dcount);

    auto* sc_dich = app.add_subcommand("dichotomy", "witness-fraction sweep");
    add_chart(sc_dich);
    add_box(sc_dich);
    sc_dich->add_option("--psi", psi_list)->required();
    sc_dich->add_option("--q-max", q_max);
    sc_dich->add_option("--q0-list", eps_str);
    sc_dich->add_option("--samples", dcount);

    auto* sc_mult = app.add_subcommand("mult-cover", "dyadic multiplicative cover sweep");
    add_chart(sc_mult);
    add_box(sc_mult);
    sc_mult->add_option("--psi", psi_all, "single multiplicative approximation function")
        ->required();
    sc_mult->add_option("--t-max", t_max);
    sc_mult->add_option("--w0", w0);
    sc_mult->add_option("--grid", grid);

    auto* sc_exp = app.add_subcommand("experiment", "run an experiment config file");
    sc_exp->add_option("config", config_path, "config file path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        Report rep;
        rep.note("tool", "diophlab 0.1.0");
        rep.note("seed", std::to_string(seed));

        if (sc_count_r->parsed()) {
            Chart chart = chart_from_arg(chart_name);
            Box B = make_box(chart, box_center, box_radii);
            auto res = count_R(chart, Q, parse_list(eps_str), B, dump_witnesses);
            if (dump_witnesses) {
                rep.header = {"q", "a", "b"};
                for (const auto& w : res.witnesses) {
                    std::string as, bs;
                    for (std::size_t i = 0; i < w.a.size(); ++i)
                        as += (i ? ";" : "") + std::to_string(w.a[i]);
                    for (std::size_t i = 0; i < w.b.size(); ++i)
                        bs += (i ? ";" : "") + std::to_string(w.b[i]);
                    rep.rows.push_back({std::to_string(w.q), as, bs});
                }
            } else {
                rep.header = {"count", "certified"};
                rep.rows.push_back({std::to_string(res.count), res.certified ? "1" : "0"});
            }
        } else if (sc_count_n->parsed()) {
            Chart chart = chart_from_arg(chart_name);
            Box B = make_box(chart, box_center, box_radii);
            long long cnt = count_N(chart, B, parse_list(eps_str), t);
            rep.header = {"count"};
            rep.rows.push_back({std::to_string(cnt)});
        } else if (sc_minima->parsed()) {
            MatQ rows = read_matrix(matrix_path);
            auto repm = successive_minima(rows.transpose(), static_cast<std::size_t>(k));
            rep.header = {"i", "lambda", "preimage", "approximate"};
            for (std::size_t i = 0; i < repm.lambdas.size(); ++i) {
                std::string pre;
                if (i < repm.vectors.size())
                    for (std::size_t j = 0; j < repm.vectors[i].size(); ++j)
                        pre += (j ? ";" : "") + std::to_string(repm.vectors[i][j]);
                rep.rows.push_back({std::to_string(i + 1), fmt(repm.lambdas[i]), pre,
                                    repm.approximate ? "1" : "0"});
            }
        } else if (sc_dual->parsed()) {
            MatQ g = read_matrix(matrix_path);
            MatQ gs = dual_matrix(g);
            rep.header = {"row"};
            for (std::size_t i = 0; i < gs.dim(); ++i) {
                std::string row;
                for (std::size_t j = 0; j < gs.dim(); ++j)
                    row += (j ? " " : "") + rat_str(gs(i, j));
                rep.rows.push_back({row});
            }
        } else if (sc_good->parsed() || sc_project->parsed()) {
            Chart chart = chart_from_arg(chart_name);
            auto eps = parse_list(eps_str);
            DivergenceParams p;
            p.c = c;
            p.Q = Q;
            p.eps = eps;
            p.eps_prime = epsp_str.empty()
                              ? select_weights(WeightMode::divergence, eps, Q, chart.layout())
                                    .eps_prime
                              : parse_list(epsp_str);
            if (sc_good->parsed()) {
                auto r = in_good_set(chart, parse_list(x_str), p);
                rep.header = {"lambda", "threshold", "in_set", "certified"};
                rep.rows.push_back({fmt(r.lambda), fmt(r.threshold), r.in_set ? "1" : "0",
                                    r.certified ? "1" : "0"});
            } else {
                double M = M_bound > 0 ? M_bound : second_order_bound(chart, chart.domain());
                auto pr = project_to_rational(chart, parse_list(x_str), p, M);
                rep.header = {"q", "a", "b", "q_lo", "q_hi"};
                std::string as, bs;
                for (std::size_t i = 0; i < pr.witness.a.size(); ++i)
                    as += (i ? ";" : "") + std::to_string(pr.witness.a[i]);
                for (std::size_t i = 0; i < pr.witness.b.size(); ++i)
                    bs += (i ? ";" : "") + std::to_string(pr.witness.b[i]);
                rep.rows.push_back({std::to_string(pr.witness.q), as, bs, fmt(pr.q_lo),
                                    fmt(pr.q_hi)});
            }
        } else if (sc_minor->parsed()) {
            Chart chart = chart_from_arg(chart_name);
            auto eps = parse_list(eps_str);
            auto epsp = epsp_str.empty()
                            ? select_weights(WeightMode::convergence, eps,
                                             static_cast<double>(t), chart.layout())
                                  .eps_prime
                            : parse_list(epsp_str);
            auto cp = ConvergenceParams::make(t, eps, epsp);
            auto r = in_minor_set(chart, parse_list(x_str), cp);
            rep.header = {"lambda", "phi", "in_set", "certified"};
            rep.rows.push_back(
                {fmt(r.lambda), fmt(r.threshold), r.in_set ? "1" : "0", r.certified ? "1" : "0"});
        } else if (sc_sf->parsed()) {
            Chart chart = chart_from_arg(chart_name);
            SFParams p;
            p.delta = delta;
            p.K = parse_list(K_str);
            p.T = parse_list(T_str);
            auto w = in_SF(chart, parse_list(x_str), p);
            rep.header = {"found", "a0", "a"};
            if (w) {
                std::string as;
                for (std::size_t i = 0; i < w->a.size(); ++i)
                    as += (i ? ";" : "") + std::to_string(w->a[i]);
                rep.rows.push_back({"1", std::to_string(w->a0), as});
            } else {
                rep.rows.push_back({"0", "", ""});
            }
        } else if (sc_bkm->parsed()) {
            SFParams p;
            p.delta = delta;
            p.K = parse_list(K_str);
            p.T = parse_list(T_str);
            p.E = E;
            p.r = rball;
            p.alpha = alpha > 0 ? alpha
                                : alpha_exponent(static_cast<std::size_t>(dcount), l_order,
                                                 p.T.size());
            auto b = bkm_bound(p, static_cast<std::size_t>(dcount), measure);
            rep.header = {"volume_term", "remainder_term", "total"};
            rep.rows.push_back({fmt(b.volume_term), fmt(b.remainder_term), fmt(b.total)});
        } else if (sc_reg->parsed()) {
            std::vector<ApproxFunction> psis;
            for (const auto& s : psi_list) psis.push_back(parse_psi(s));
            auto res = regularize_psi(WeightSystem(psis), parse_psi(psi_all), horizon);
            rep.note("q_star", std::to_string(res.q_star));
            rep.header = {"q"};
            for (std::size_t i = 0; i < psis.size(); ++i)
                rep.header.push_back("psi_prime_" + std::to_string(i + 1));
            for (std::int64_t q = 1; q <= horizon; ++q) {
                std::vector<std::string> row{std::to_string(q)};
                for (std::size_t i = 0; i < psis.size(); ++i)
                    row.push_back(fmt(res.regularized.psis[i](q)));
                rep.rows.push_back(row);
            }
        } else if (sc_split->parsed()) {
            std::vector<ApproxFunction> psis;
            for (const auto& s : psi_list) psis.push_back(parse_psi(s));
            auto res = permutation_split(WeightSystem(psis), horizon);
            rep.header = {"pi", "count", "first_q", "last_q"};
            for (const auto& part : res.parts) {
                std::string pi;
                for (std::size_t i = 0; i < part.pi.size(); ++i)
                    pi += (i ? ";" : "") + std::to_string(part.pi[i] + 1);
                rep.rows.push_back({pi, std::to_string(part.sequence.size()),
                                    std::to_string(part.sequence.front()),
                                    std::to_string(part.sequence.back())});
            }
        } else if (sc_sched->parsed()) {
            std::vector<ApproxFunction> psis;
            for (const auto& s : psi_list) psis.push_back(parse_psi(s));
            auto res = divergence_schedule(WeightSystem(psis), s_prime, t_max);
            rep.note("s", fmt(res.s));
            if (res.empty_warning) rep.note("warning", "empty schedule");
            rep.header = {"t", "class", "tail_bound_holds"};
            for (std::size_t i = 0; i < res.t_list.size(); ++i)
                rep.rows.push_back({std::to_string(res.t_list[i]), res.in_t1[i] ? "T1" : "T2",
                                    res.tail_bound_holds[i] ? "1" : "0"});
        } else if (sc_ubiq->parsed() || sc_dich->parsed() || sc_mult->parsed() ||
                   sc_exp->parsed()) {
            std::ostringstream cfgtext;
            if (sc_exp->parsed()) {
                std::ifstream f(config_path);
                if (!f) throw ConfigError("cannot open config: " + config_path);
                cfgtext << f.rdbuf();
            } else {
                cfgtext << "[experiment]\n";
                cfgtext << "kind = "
                        << (sc_ubiq->parsed() ? "ubiquity"
                                              : (sc_dich->parsed() ? "dichotomy"
                                                                   : "multiplicative"))
                        << "\n";
                cfgtext << "chart = " << chart_name << "\n";
                cfgtext << "seed = " << seed << "\n";
                if (dcount > 1) cfgtext << "samples = " << dcount << "\n";
                if (!box_center.empty()) {
                    cfgtext << "[box]\ncenter = " << box_center << "\nradii = " << box_radii
                            << "\n";
                }
                cfgtext << "[psi]\n";
                for (std::size_t i = 0; i < psi_list.size(); ++i)
                    cfgtext << "f" << (i + 1) << " = " << psi_list[i] << "\n";
                if (!psi_all.empty()) cfgtext << "f1 = " << psi_all << "\n";
                cfgtext << "[params]\n";
                if (sc_ubiq->parsed()) {
                    cfgtext << "s_prime = " << s_prime << "\nt_max = " << t_max << "\nc = " << c
                            << "\nk0 = " << k0 << "\ngrid = " << grid << "\n";
                } else if (sc_dich->parsed()) {
                    cfgtext << "q_max = " << q_max << "\n";
                    if (!eps_str.empty()) cfgtext << "q0_list = " << eps_str << "\n";
                } else {
                    cfgtext << "t_max = " << t_max << "\nw0 = " << w0 << "\ngrid = " << grid
                            << "\n";
                }
            }
            rep = run_experiment(Config::parse(cfgtext.str()), static_cast<int>(threads));
        }

        emit(rep, out_path, format);
        return rep.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
