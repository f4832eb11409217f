// lzcomm: factorizations, AVL grammars, the LCP / Hamming protocols and the
// experiment scans from one command line. JSON on stdout, diagnostics on
// stderr, exit code 0 iff no error.

#include "lzcomm/avl_constants.hpp"
#include "lzcomm/avl_grammar.hpp"
#include "lzcomm/error.hpp"
#include "lzcomm/experiments.hpp"
#include "lzcomm/factorization.hpp"
#include "lzcomm/protocol.hpp"
#include "lzcomm/transport.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace lzcomm;
using nlohmann::json;

namespace {

struct Globals {
    std::string format = "text";
    bool literal = false; // positional inputs are the strings themselves
    std::string out;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << data;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

SymbolFormat format_of(const Globals& g) { return parse_symbol_format(g.format); }

// An input is a factorization file (starts with "#mode=") or a string. Text
// files lose one trailing newline.
struct Input {
    SymbolString symbols;
    std::optional<Factorization> factorization;
};

Input load_input(const std::string& arg, const Globals& g)
{
    std::string data = g.literal ? arg : read_file(arg);
    Input in;
    if (!g.literal && data.rfind("#mode=", 0) == 0) {
        in.factorization = read_factorization(data);
        in.symbols = decompress(*in.factorization);
        return in;
    }
    if (!g.literal && format_of(g) == SymbolFormat::Text) {
        if (!data.empty() && data.back() == '\n') data.pop_back();
        if (!data.empty() && data.back() == '\r') data.pop_back();
    }
    in.symbols = SymbolString::parse(data, format_of(g));
    return in;
}

Factorization lzn_of(const Input& in)
{
    if (in.factorization) {
        if (in.factorization->mode() != Mode::LZN) throw Error("protocol inputs must be LZN factorizations");
        return *in.factorization;
    }
    return factorize_lzn(in.symbols);
}

avl::AvlGrammar load_grammar(const std::string& path) { return avl::load(read_file(path)); }

json grammar_json(const avl::AvlGrammar& g)
{
    return {{"empty", g.empty()}, {"size", g.size()}, {"height", g.height()}, {"length", g.length()}};
}

void put_grammar(const avl::AvlGrammar& g, const std::string& path, json& report, const char* key)
{
    if (!path.empty()) write_file(path, avl::dump(g));
    else report[key] = avl::dump(g);
}

std::vector<std::size_t> parse_list(const std::string& text)
{
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(static_cast<std::size_t>(std::stoull(item)));
    }
    return out;
}

std::vector<std::size_t> parse_triplet(const std::string& text, std::size_t count)
{
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) out.push_back(static_cast<std::size_t>(std::stoull(item)));
    if (out.size() != count) throw Error("expected " + std::to_string(count) + " ':'-separated numbers in '" + text + "'");
    return out;
}

void write_csv(const Globals& g, const std::string& csv, json& report)
{
    if (!g.out.empty()) write_file(g.out, csv);
    else report["csv"] = csv;
}

json zeta_row(const experiments::ZetaRow& r)
{
    return {{"id", r.id}, {"n", r.n}, {"i", r.i}, {"z", r.z}, {"z_suffix", r.z_suffix}, {"ratio", r.ratio}};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"LZ77 factorizations, AVL grammars and LZ-compressed communication protocols"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--format", g.format, "Symbol format of string inputs")->check(CLI::IsMember({"text", "ints"}));
    app.add_flag("--inline", g.literal, "Treat positional inputs as literal strings, not paths");
    app.add_option("--out", g.out, "Output file");

    // factorize
    auto* factorize_cmd = app.add_subcommand("factorize", "Factorize a string");
    std::string mode = "LZN";
    std::string input_a, input_b;
    factorize_cmd->add_option("--mode", mode, "LZN, LZS or CN")->check(CLI::IsMember({"LZN", "LZS", "CN"}, CLI::ignore_case));
    factorize_cmd->add_option("input", input_a, "String file (or the string with --inline)")->required();

    // decompress
    auto* decompress_cmd = app.add_subcommand("decompress", "Rebuild the string of a factorization file");
    decompress_cmd->add_option("input", input_a, "Factorization file")->required();

    // grammar
    auto* grammar_cmd = app.add_subcommand("grammar", "AVL grammar operations");
    grammar_cmd->require_subcommand(1);
    grammar_cmd->fallthrough();
    auto* g_build = grammar_cmd->add_subcommand("build", "Grammar of a string");
    g_build->add_option("input", input_a)->required();
    auto* g_concat = grammar_cmd->add_subcommand("concat", "Concatenate two grammars");
    g_concat->add_option("first", input_a)->required();
    g_concat->add_option("second", input_b)->required();
    auto* g_split = grammar_cmd->add_subcommand("split", "Split at a position (prefix = S[1..i-1])");
    std::uint64_t split_at = 1;
    std::string prefix_out;
    g_split->add_option("grammar", input_a)->required();
    g_split->add_option("position", split_at)->required();
    g_split->add_option("--prefix-out", prefix_out, "Where to write the prefix grammar");
    auto* g_validate = grammar_cmd->add_subcommand("validate", "Check balance and cached values");
    g_validate->add_option("grammar", input_a)->required();
    auto* g_expand = grammar_cmd->add_subcommand("expand", "Expand a grammar");
    g_expand->add_option("grammar", input_a)->required();

    // protocol
    ProtocolConfig cfg;
    std::optional<std::uint64_t> sigma;
    std::uint64_t seed = 0;
    bool no_sentinel = false;
    std::optional<std::uint16_t> listen_port;
    std::string connect_to_endpoint;
    std::string transcript_path;
    auto* protocol_cmd = app.add_subcommand("protocol", "Run a two-party protocol");
    protocol_cmd->require_subcommand(1);
    protocol_cmd->fallthrough();
    auto add_protocol_options = [&](CLI::App* c) {
        c->add_option("inputs", input_a, "Own input; in-process runs take Alice's then Bob's")->required();
        c->add_option("bob", input_b, "Bob's input (in-process runs)");
        c->add_option("--seed", seed, "Public-coin seed")->envname("LZCOMM_SEED");
        c->add_option("--width", cfg.width, "Fingerprint bits per message")->check(CLI::Range(1, 64));
        c->add_option("--epsilon", cfg.epsilon, "Error budget in (0, 1/2)");
        c->add_option("--sigma", sigma, "Alphabet size (default: 0x110000 for text, 2^32-2 for ints)");
        c->add_flag("--no-sentinel", no_sentinel, "Hamming without #A$ / $B# wrapping");
        c->add_flag("--verify", cfg.verify, "Re-check the located boundary with a second base");
        c->add_option("--listen", listen_port, "Play Bob, waiting on this port");
        c->add_option("--connect", connect_to_endpoint, "Play Alice, connecting to host:port");
        c->add_option("--transcript", transcript_path, "Write the JSON-lines transcript here");
    };
    auto* p_lcp = protocol_cmd->add_subcommand("lcp", "Longest common prefix");
    auto* p_ham = protocol_cmd->add_subcommand("hamming", "Hamming distance by LCP jumps");
    add_protocol_options(p_lcp);
    add_protocol_options(p_ham);

    auto* replay_cmd = app.add_subcommand("replay", "Re-check a JSON-lines transcript");
    replay_cmd->add_option("transcript", input_a)->required();

    // experiment
    auto* experiment_cmd = app.add_subcommand("experiment", "Scans and benchmarks (CSV via --out)");
    experiment_cmd->require_subcommand(1);
    experiment_cmd->fallthrough();
    std::uint64_t exp_seed = 0;
    auto* e_family = experiment_cmd->add_subcommand("family", "Lower-bound family counts");
    unsigned sigma_min = 4, sigma_max = 128, run_h = 1;
    e_family->add_option("--sigma-min", sigma_min);
    e_family->add_option("--sigma-max", sigma_max);
    e_family->add_option("--run-length", run_h, "Run length h replacing each 0");
    e_family->add_option("--seed", exp_seed)->envname("LZCOMM_SEED");

    auto* e_zeta = experiment_cmd->add_subcommand("zeta", "Suffix ratio scan");
    std::string exhaustive, random_spec;
    std::vector<std::string> corpus;
    std::string zeta_mode = "LZN";
    e_zeta->add_option("--exhaustive", exhaustive, "alphabet:max_len");
    e_zeta->add_option("--random", random_spec, "count:n:sigma");
    e_zeta->add_option("--mode", zeta_mode)->check(CLI::IsMember({"LZN", "LZS"}, CLI::ignore_case));
    e_zeta->add_option("--seed", exp_seed)->envname("LZCOMM_SEED");
    e_zeta->add_option("corpus", corpus, "String files");

    auto* e_chain = experiment_cmd->add_subcommand("avl-chain", "zn <= cn <= avl along suffixes");
    std::size_t samples = 50;
    unsigned family_max = 0;
    e_chain->add_option("--samples", samples);
    e_chain->add_option("--random", random_spec, "count:n:sigma");
    e_chain->add_option("--family-max", family_max, "Add family strings for sigma = 8..this");
    e_chain->add_option("--seed", exp_seed)->envname("LZCOMM_SEED");
    e_chain->add_option("corpus", corpus, "String files");

    auto* e_bench = experiment_cmd->add_subcommand("bench", "Hamming protocol on planted pairs");
    experiments::BenchParams bench;
    std::string distances = "0,1,2,5,16,32";
    e_bench->add_option("--n", bench.n);
    e_bench->add_option("--d", distances, "Comma-separated mismatch counts");
    e_bench->add_option("--pairs", bench.pairs);
    e_bench->add_option("--sigma", bench.sigma);
    e_bench->add_flag("--family", bench.family, "Use lower-bound family strings as bases");
    e_bench->add_option("--width", bench.config.width)->check(CLI::Range(1, 64));
    e_bench->add_flag("--no-sentinel", no_sentinel);
    e_bench->add_option("--seed", exp_seed)->envname("LZCOMM_SEED");

    CLI11_PARSE(app, argc, argv);

    try {
        if (factorize_cmd->parsed()) {
            const Input in = load_input(input_a, g);
            const Factorization f = factorize(in.symbols, parse_mode(mode));
            if (!g.out.empty()) write_file(g.out, write_factorization(f, format_of(g)));
            emit({{"mode", mode_name(f.mode())},
                  {"n", in.symbols.size()},
                  {"size", f.size()},
                  {"triples", render_triples(f, format_of(g))}});
        } else if (decompress_cmd->parsed()) {
            const Factorization f = read_factorization(read_file(input_a));
            const SymbolString s = decompress(f);
            const SymbolFormat fmt = s.has_sentinels() ? SymbolFormat::Ints : format_of(g);
            if (!g.out.empty()) write_file(g.out, s.format(fmt));
            emit({{"mode", mode_name(f.mode())}, {"n", s.size()}, {"string", s.format(fmt)}});
        } else if (grammar_cmd->parsed()) {
            json report;
            if (g_build->parsed()) {
                const auto gr = avl::build(load_input(input_a, g).symbols);
                report = grammar_json(gr);
                put_grammar(gr, g.out, report, "grammar");
            } else if (g_concat->parsed()) {
                const auto gr = avl::concat(load_grammar(input_a), load_grammar(input_b));
                report = grammar_json(gr);
                put_grammar(gr, g.out, report, "grammar");
            } else if (g_split->parsed()) {
                const auto gr = load_grammar(input_a);
                const auto [pre, suf] = avl::split(gr, split_at);
                report = {{"prefix", grammar_json(pre)}, {"suffix", grammar_json(suf)}};
                put_grammar(suf, g.out, report, "suffix_grammar");
                if (!prefix_out.empty()) write_file(prefix_out, avl::dump(pre));
            } else if (g_validate->parsed()) {
                const auto gr = load_grammar(input_a);
                const auto v = avl::validate(gr);
                report = grammar_json(gr);
                report["ok"] = v.ok();
                report["violations"] = v.violations;
                emit(report);
                return v.ok() ? 0 : 1;
            } else if (g_expand->parsed()) {
                const auto s = avl::expand(load_grammar(input_a));
                const SymbolFormat fmt = s.has_sentinels() ? SymbolFormat::Ints : format_of(g);
                if (!g.out.empty()) write_file(g.out, s.format(fmt));
                report = {{"n", s.size()}, {"string", s.format(fmt)}};
            }
            emit(report);
        } else if (protocol_cmd->parsed()) {
            const bool hamming = p_ham->parsed();
            cfg.seed = seed;
            cfg.sentinel = !no_sentinel;
            cfg.sigma = sigma ? *sigma : (format_of(g) == SymbolFormat::Text ? kTextSigma : kIntsSigma);
            cfg.validate();
            const bool remote = listen_port.has_value() || !connect_to_endpoint.empty();
            if (listen_port && !connect_to_endpoint.empty()) throw Error("use either --listen or --connect");
            if (remote && !input_b.empty()) throw Error("a socket party takes exactly one input");
            if (!remote && input_b.empty()) throw Error("an in-process run needs Alice's and Bob's inputs");

            Transcript transcript;
            if (!remote) {
                const auto a = lzn_of(load_input(input_a, g));
                const auto b = lzn_of(load_input(input_b, g));
                transcript = hamming ? hamming_protocol(a, b, cfg).transcript : lcp_protocol(a, b, cfg).transcript;
            } else {
                const auto own = lzn_of(load_input(input_a, g));
                Socket s;
                Speaker role = Speaker::Alice;
                if (listen_port) {
                    Listener listener(*listen_port);
                    s = listener.accept();
                    role = Speaker::Bob;
                } else {
                    const auto [host, port] = parse_endpoint(connect_to_endpoint);
                    s = connect_to(host, port);
                }
                transcript = hamming ? hamming_over_socket(role, own, cfg, s).transcript
                                     : lcp_over_socket(role, own, cfg, s).transcript;
            }
            if (!transcript_path.empty()) write_file(transcript_path, to_json_lines(transcript));

            std::uint64_t comparisons = 0;
            for (const auto& m : transcript.messages) comparisons += m.kind == MessageKind::Fingerprint;
            std::uint64_t n_max = 0;
            for (const auto& s : transcript.sessions) n_max = std::max(n_max, s.n);
            const double error_bound =
                std::min(1.0, static_cast<double>(comparisons) * comparison_error_bound(n_max, cfg.width));
            if (error_bound > cfg.epsilon) {
                std::cerr << "warning: analytic error bound " << error_bound << " exceeds epsilon " << cfg.epsilon
                          << "\n";
            }
            json report = transcript.result;
            report["protocol"] = transcript.protocol;
            report["rounds"] = transcript.rounds();
            report["bits"] = transcript.total_bits();
            report["width"] = cfg.width;
            report["seed"] = cfg.seed;
            report["epsilon"] = cfg.epsilon;
            report["error_bound"] = error_bound;
            emit(report);
        } else if (replay_cmd->parsed()) {
            const auto parsed = parse_json_lines(read_file(input_a));
            const auto r = replay(parsed);
            emit({{"ok", r.ok()},
                  {"problems", r.problems},
                  {"rounds", parsed.transcript.rounds()},
                  {"bits", parsed.transcript.total_bits()}});
            return r.ok() ? 0 : 1;
        } else if (experiment_cmd->parsed()) {
            json report;
            if (e_family->parsed()) {
                const auto rows = experiments::verify_lower_bound(sigma_min, sigma_max, run_h);
                std::size_t failed = 0;
                json failures = json::array();
                for (const auto& r : rows) {
                    if (!r.holds) {
                        ++failed;
                        failures.push_back(r.sigma);
                    }
                }
                report = {{"rows", rows.size()}, {"failed", failed}, {"failed_sigma", failures}, {"h", run_h}};
                write_csv(g, experiments::lower_bound_csv(rows), report);
            } else if (e_zeta->parsed()) {
                const Mode m = parse_mode(zeta_mode);
                experiments::ZetaReport z;
                if (!exhaustive.empty()) {
                    const auto p = parse_triplet(exhaustive, 2);
                    z = experiments::zeta_scan_exhaustive(static_cast<unsigned>(p[0]), static_cast<unsigned>(p[1]), m);
                } else if (!random_spec.empty()) {
                    const auto p = parse_triplet(random_spec, 3);
                    z = experiments::zeta_scan_random(p[0], p[1], static_cast<unsigned>(p[2]), exp_seed, m);
                } else {
                    std::vector<SymbolString> strings;
                    for (const auto& path : corpus) strings.push_back(load_input(path, g).symbols);
                    z = experiments::zeta_scan(strings, m);
                }
                report = {{"mode", mode_name(m)},
                          {"strings", z.rows.size()},
                          {"witnesses", z.witnesses},
                          {"violations", z.violations}};
                if (z.max) report["max"] = zeta_row(*z.max);
                write_csv(g, experiments::zeta_csv(z), report);
            } else if (e_chain->parsed()) {
                std::vector<SymbolString> strings;
                for (const auto& path : corpus) strings.push_back(load_input(path, g).symbols);
                for (unsigned s = 8; family_max >= 8 && s <= family_max; s += 2) {
                    strings.push_back(experiments::gen_family({s, 1}));
                }
                if (!random_spec.empty()) {
                    const auto p = parse_triplet(random_spec, 3);
                    std::mt19937_64 rng(exp_seed);
                    for (std::size_t t = 0; t < p[0]; ++t) {
                        std::vector<Symbol> v(p[1]);
                        for (auto& c : v) c = static_cast<Symbol>(rng() % std::max<std::size_t>(1, p[2]));
                        strings.emplace_back(std::move(v));
                    }
                }
                const auto rows = experiments::avl_chain_scan(strings, samples, exp_seed);
                std::size_t broken = 0, invalid = 0;
                double max_growth = 0;
                for (const auto& r : rows) {
                    broken += !r.chain_ok;
                    invalid += !r.valid;
                    max_growth = std::max(max_growth, r.growth);
                }
                report = {{"rows", rows.size()},          {"chain_violations", broken}, {"invalid", invalid},
                          {"max_growth", max_growth},     {"c_split", avl::kCSplit},
                          {"within_c_split", max_growth <= avl::kCSplit}};
                write_csv(g, experiments::chain_csv(rows), report);
            } else if (e_bench->parsed()) {
                bench.distances = parse_list(distances);
                bench.seed = exp_seed;
                bench.config.sentinel = !no_sentinel;
                const auto rows = experiments::protocol_bench(bench);
                std::size_t errors = 0, over = 0;
                for (const auto& r : rows) {
                    errors += r.error;
                    over += r.rounds > r.round_bound;
                }
                const auto fit = experiments::fit_rounds(rows);
                report = {{"rows", rows.size()},
                          {"errors", errors},
                          {"over_round_bound", over},
                          {"slope", fit.slope},
                          {"intercept", fit.intercept}};
                write_csv(g, experiments::bench_csv(rows), report);
            }
            emit(report);
        }
    } catch (const MalformedFactorization& e) {
        std::cerr << "error: malformed factorization: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
