#include "hforge/cli.hpp"

#include "hforge/approx.hpp"
#include "hforge/evaluation.hpp"
#include "hforge/io.hpp"
#include "hforge/oracles.hpp"
#include "hforge/reductions.hpp"
#include "hforge/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

namespace hforge {

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw Error("cannot write '" + path + "'");
}

struct MetricArgs {
    std::string kind = "total";
    std::string beta;
    std::optional<std::size_t> horizon;

    void add(CLI::App* app)
    {
        app->add_option("--metric", kind, "total, disc or avg")
            ->check(CLI::IsMember({"total", "disc", "avg"}));
        app->add_option("--beta", beta, "discount factor p/q");
        app->add_option("--horizon", horizon, "finite horizon");
    }

    Metric build() const
    {
        Metric m;
        if (kind == "total") {
            if (!horizon)
                throw DomainError("--metric total needs --horizon");
            m = FiniteTotal{*horizon};
        } else if (kind == "disc") {
            if (beta.empty())
                throw DomainError("--metric disc needs --beta");
            const Rat b = Rat::parse(beta);
            if (horizon)
                m = FiniteDiscounted{b, *horizon};
            else
                m = InfiniteDiscounted{b};
        } else {
            if (horizon)
                throw DomainError("--metric avg takes no horizon");
            m = Average{};
        }
        validate_metric(m);
        return m;
    }
};

std::string policy_text(const StationaryPolicy& p)
{
    std::string s;
    for (const auto a : p.act)
        s += std::to_string(a);
    return s;
}

void print_gadget(std::ostream& out, const GadgetOutput& g, const std::string& file)
{
    if (const auto* m = std::get_if<Pomdp>(&g.model))
        out << "model: pomdp, " << m->n_states() << " states, " << m->n_actions() << " actions, " << m->n_obs()
            << " observations\n";
    else
        out << "model: 2tbn, " << g.tbn().n_fluents() << " fluents, " << g.tbn().actions.size() << " actions\n";
    out << "metric: " << to_string(g.recommended_metric) << "\n"
        << "claim: " << g.claim.text << "\n"
        << "written: " << file << "\n";
}

void write_gadget(const GadgetOutput& g, const std::string& file)
{
    if (const auto* m = std::get_if<Pomdp>(&g.model))
        write_file(file, serialize_pomdp(*m));
    else
        write_file(file, serialize_tbn(g.tbn()));
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact gadget compiler and value checker for POMDP hardness reductions", "hforge"};
    app.require_subcommand(1);
    app.fallthrough(false);

    // compile
    auto* compile = app.add_subcommand("compile", "build a gadget from a source instance");
    compile->require_subcommand(1);
    std::string src, dest;
    const auto add_io = [&](CLI::App* c) {
        c->add_option("source", src, "input file")->required();
        c->add_option("-o,--output", dest, "output file")->required();
    };
    std::string eps_text, discount_text;
    bool amplify = false;
    std::optional<unsigned> c_opt;
    std::optional<std::size_t> k_opt, test_exponent;
    std::size_t gap = 1;

    auto* c_sat3 = compile->add_subcommand("sat3", "clause walk POMDP from a CNF");
    add_io(c_sat3);
    c_sat3->add_option("--eps", eps_text, "gap parameter in [0,1)");
    c_sat3->add_flag("--amplify", amplify, "chained unobservable copies");
    c_sat3->add_option("--discount", discount_text, "discount for the amplified gadget");
    auto* c_uomdp = compile->add_subcommand("uomdp", "unobservable gadget from a CNF");
    add_io(c_uomdp);
    auto* c_ssat = compile->add_subcommand("ssat", "POMDP from an SSAT formula");
    add_io(c_ssat);
    auto* ssat_eps = c_ssat->add_option("--eps", eps_text, "choose c and k from eps");
    auto* ssat_c = c_ssat->add_option("--c", c_opt, "error exponent");
    auto* ssat_k = c_ssat->add_option("--k", k_opt, "number of copies");
    ssat_eps->excludes(ssat_c)->excludes(ssat_k);
    auto* c_cvp = compile->add_subcommand("cvp", "MDP from a single-output circuit");
    add_io(c_cvp);
    c_cvp->add_option("--gap", gap, "gap parameter k");
    auto* c_tbn = compile->add_subcommand("tbn", "2TBN computing a circuit in one step");
    add_io(c_tbn);
    auto* c_succ = compile->add_subcommand("succinct-cvp", "2TBN from a succinct circuit instance");
    add_io(c_succ);
    c_succ->add_option("--gap", gap, "gap parameter k");
    c_succ->add_option("--test-exponent", test_exponent, "reduced reward exponent");
    auto* c_inf = compile->add_subcommand("inf", "infinite-horizon gadget from a CNF");
    add_io(c_inf);

    // eval
    auto* eval = app.add_subcommand("eval", "value of a policy");
    std::string model_file, policy_file;
    MetricArgs metric_args;
    eval->add_option("model", model_file, "POMDP file")->required();
    eval->add_option("--policy", policy_file, "policy file")->required();
    metric_args.add(eval);

    // value
    auto* value = app.add_subcommand("value", "exact optimal value over a policy class");
    std::string policy_class = "stat";
    value->add_option("model", model_file, "POMDP file")->required();
    value->add_option("--class", policy_class, "stat, time or hist")
        ->check(CLI::IsMember({"stat", "time", "hist"}));
    metric_args.add(value);

    // verify
    auto* verify = app.add_subcommand("verify", "end-to-end dichotomy check");
    VerifyOptions vo;
    std::string path;
    verify->add_option("source", src, "CNF, SSAT, circuit or succinct instance")->required();
    verify->add_option("--path", path, "sat3, gap, uomdp, amplify, inf, ssat, cvp, tbn, succinct");
    verify->add_option("--eps", eps_text, "gap parameter for the gap path");
    verify->add_option("--c", c_opt, "SSAT error exponent");
    verify->add_option("--k", k_opt, "SSAT copies");
    verify->add_option("--gap", gap, "circuit gap parameter k");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "least positive value bound");
    bounds->add_option("model", model_file, "POMDP file")->required();
    metric_args.add(bounds);

    // expand
    auto* expand = app.add_subcommand("expand", "flatten a 2TBN");
    expand->add_option("source", src, "2TBN file")->required();
    expand->add_option("-o,--output", dest, "output POMDP file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    const Caps caps = [&] {
        try {
            return Caps::from_env();
        } catch (const Error&) {
            return Caps{};
        }
    }();

    try {
        if (*compile) {
            GadgetOutput g;
            if (*c_sat3) {
                const auto f = parse_cnf(read_file(src));
                if (amplify) {
                    if (!eps_text.empty())
                        throw DomainError("--eps and --amplify are exclusive");
                    std::optional<Rat> beta;
                    if (!discount_text.empty())
                        beta = Rat::parse(discount_text);
                    g = amplify_uomdp(f, beta);
                } else {
                    if (!discount_text.empty())
                        throw DomainError("--discount needs --amplify");
                    g = eps_text.empty() ? threesat_to_pomdp(f) : epsilon_gap_gadget(f, Rat::parse(eps_text));
                }
            } else if (*c_uomdp) {
                g = threesat_to_uomdp(parse_cnf(read_file(src)));
            } else if (*c_ssat) {
                const auto f = parse_ssat(read_file(src));
                unsigned c = 1;
                std::size_t k = 1;
                if (!eps_text.empty()) {
                    std::tie(c, k) = choose_ssat_constants(Rat::parse(eps_text), f.prefix.size());
                } else {
                    c = c_opt.value_or(1);
                    k = k_opt.value_or(1);
                }
                g = ssat_repeat(ssat_to_pomdp(f, c), k);
                out << "constants: c=" << c << " k=" << k << "\n";
            } else if (*c_cvp) {
                g = cvp_to_mdp(parse_circuit(read_file(src)), gap);
            } else if (*c_tbn) {
                const auto layout = circuit_to_2tbn_layout(parse_circuit(read_file(src)));
                write_file(dest, serialize_tbn(layout.tbn));
                out << "model: 2tbn, " << layout.tbn.n_fluents() << " fluents\n"
                    << "outputs: fluents";
                for (const auto f : layout.output_fluents)
                    out << " " << f;
                out << "\nwritten: " << dest << "\n";
                return 0;
            } else if (*c_succ) {
                SuccinctOptions so;
                so.k_gap = gap;
                so.test_exponent = test_exponent;
                g = succinct_cvp_to_2tbn(parse_succinct_instance(read_file(src)), so);
            } else if (*c_inf) {
                g = infinite_horizon_sat_gadget(parse_cnf(read_file(src)));
            }
            write_gadget(g, dest);
            print_gadget(out, g, dest);
            return 0;
        }
        if (*eval) {
            const auto m = parse_pomdp(read_file(model_file));
            const auto pol = parse_policy(read_file(policy_file));
            out << "value: " << performance(m, pol, metric_args.build()).str() << "\n";
            return 0;
        }
        if (*value) {
            const auto m = parse_pomdp(read_file(model_file));
            const auto metric = metric_args.build();
            if (policy_class == "stat") {
                const auto best = brute_force_stationary_value(m, metric, caps);
                out << "value: " << best.value.str() << "\n"
                    << "witness: " << policy_text(best.witness) << "\n";
            } else if (policy_class == "time") {
                const auto best = brute_force_time_dependent_value(m, metric, caps);
                out << "value: " << best.value.str() << "\n";
                out << "witness:";
                for (const auto& row : best.witness.act)
                    out << " " << policy_text(StationaryPolicy{row});
                out << "\n";
            } else {
                out << "value: " << exact_history_value(m, metric, caps).str() << "\n";
            }
            return 0;
        }
        if (*verify) {
            vo.path = path;
            if (!eps_text.empty())
                vo.eps = Rat::parse(eps_text);
            vo.c = c_opt;
            vo.k = k_opt;
            vo.gap = gap;
            vo.caps = caps;
            const auto rep = verify_source(read_file(src), vo);
            out << rep.text();
            return rep.pass ? 0 : 1;
        }
        if (*bounds) {
            const auto m = parse_pomdp(read_file(model_file));
            out << "delta: " << positive_value_lower_bound(m, metric_args.build()).str() << "\n";
            return 0;
        }
        if (*expand) {
            const auto m = expand_2tbn(parse_tbn(read_file(src)), caps);
            write_file(dest, serialize_pomdp(m));
            out << "model: pomdp, " << m.n_states() << " states\nwritten: " << dest << "\n";
            return 0;
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        for (const auto& v : e.violations())
            err << "  " << v.message << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace hforge
