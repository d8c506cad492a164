// densediv command line. Talks to the library only through densediv.h.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "densediv/densediv.h"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;

struct Failure {
    int code;
    std::string message;
};

int exit_code_for(dd_status s) {
    switch (s) {
        case DD_OK: return 0;
        case DD_ERR_INVALID_ARGUMENT:
        case DD_ERR_DOMAIN: return kExitValidation;
        case DD_ERR_BUDGET: return kExitBudget;
        default: return kExitRuntime;
    }
}

void check(dd_status s) {
    if (s != DD_OK) throw Failure{exit_code_for(s), std::string(dd_status_name(s)) + ": " + dd_last_error()};
}

[[noreturn]] void invalid(const std::string& what) { throw Failure{kExitValidation, what}; }

// grows the buffer until the call fits
template <class F>
std::string fetch_string(F&& call) {
    std::string buf(4096, '\0');
    size_t needed = 0;
    dd_status s = call(buf.data(), buf.size(), &needed);
    if (s == DD_ERR_BUFFER_TOO_SMALL) {
        buf.assign(needed, '\0');
        s = call(buf.data(), buf.size(), &needed);
    }
    check(s);
    buf.resize(needed ? needed - 1 : 0);
    return buf;
}

struct RuleDeleter {
    void operator()(dd_rule* r) const { dd_rule_free(r); }
};
struct HistDeleter {
    void operator()(dd_hist* h) const { dd_hist_free(h); }
};
struct StreamDeleter {
    void operator()(dd_stream* s) const { dd_stream_free(s); }
};
struct OmegaDeleter {
    void operator()(dd_omega* o) const { dd_omega_free(o); }
};
struct DzDeleter {
    void operator()(dd_dz* d) const { dd_dz_free(d); }
};
using RulePtr = std::unique_ptr<dd_rule, RuleDeleter>;

// ---------------------------------------------------------------------------

struct Config {
    std::string rule = "dense";
    double t = 2;
    std::vector<double> xs;
    double y = 100;
    std::vector<double> phis;
    double z = 1;
    std::string mode = "omega";
    double v_max = 50;
    double u_max = 50;
    double h = 0.005;
    std::vector<double> points;
    double grid = 0.5;
    std::string output;
    std::string format = "csv";
    bool resume = false;
    unsigned threads = 1;
};

uint64_t as_count(double x, const char* name) {
    if (!(x >= 1) || x > 1.8e19 || std::floor(x) != x) invalid(std::string(name) + " must be a positive integer");
    return static_cast<uint64_t>(x);
}

dd_nu_mode parse_mode(const std::string& m) {
    if (m == "omega") return DD_SMALL_OMEGA;
    if (m == "Omega") return DD_BIG_OMEGA;
    invalid("mode must be omega or Omega");
}

const char* mode_name(dd_nu_mode m) { return m == DD_BIG_OMEGA ? "Omega" : "omega"; }

RulePtr make_rule(const Config& c) {
    dd_rule* r = nullptr;
    if (c.rule == "dense")
        check(dd_rule_dense(c.t, &r));
    else if (c.rule == "practical")
        check(dd_rule_practical(&r));
    else
        invalid("rule must be dense or practical");
    return RulePtr(r);
}

dd_complex z_of(const Config& c, double phi) { return {c.z * std::cos(phi), c.z * std::sin(phi)}; }

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

// Output sink: a file when --output is set, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path, bool append = false) {
        if (path.empty()) return;
        file_.open(path, append ? std::ios::app : std::ios::trunc);
        if (!file_) throw Failure{kExitRuntime, "cannot open " + path};
    }
    std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

// Table printed as CSV or as a JSON array of objects.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<std::string>> text;  // optional leading string columns

    void print(std::ostream& os, const std::string& format) const {
        if (format == "json") {
            ordered_json arr = ordered_json::array();
            for (size_t r = 0; r < rows.size(); ++r) {
                ordered_json obj;
                size_t k = 0;
                if (r < text.size())
                    for (; k < text[r].size(); ++k) obj[header[k]] = text[r][k];
                for (size_t j = 0; j < rows[r].size(); ++j) obj[header[k + j]] = rows[r][j];
                arr.push_back(obj);
            }
            os << arr.dump(2) << '\n';
            return;
        }
        for (size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
        os << '\n';
        for (size_t r = 0; r < rows.size(); ++r) {
            bool first = true;
            if (r < text.size())
                for (const auto& s : text[r]) {
                    os << (first ? "" : ",") << s;
                    first = false;
                }
            for (double v : rows[r]) {
                os << (first ? "" : ",") << num(v);
                first = false;
            }
            os << '\n';
        }
    }
};

// ---------------------------------------------------------------------------

int cmd_enumerate(const Config& c) {
    if (c.xs.size() != 1) invalid("enumerate takes exactly one --x");
    const uint64_t x = as_count(c.xs[0], "x");
    auto rule = make_rule(c);
    uint64_t start = 1;
    bool append = false;
    if (c.resume) {
        if (c.output.empty()) invalid("--resume needs --output");
        uint64_t last = 0;
        int64_t bytes = 0;
        int found = 0;
        check(dd_checkpoint_tail(c.output.c_str(), &last, &bytes, &found));
        if (found) {
            // drop a torn final line before appending
            std::filesystem::resize_file(c.output, static_cast<uintmax_t>(bytes));
            start = last + 1;
            append = true;
        }
    }
    Sink sink(c.output, append);
    auto& os = sink.out();
    if (start > x) return 0;
    dd_stream* raw = nullptr;
    check(dd_stream_open(rule.get(), x, start, &raw));
    std::unique_ptr<dd_stream, StreamDeleter> stream(raw);
    char line[512];
    for (;;) {
        int has = 0;
        check(dd_stream_next(stream.get(), line, sizeof line, nullptr, &has));
        if (!has) break;
        os << line << '\n';
    }
    os.flush();
    return 0;
}

int cmd_constants(const Config& c) {
    Sink sink(c.output);
    sink.out() << fetch_string([](char* b, size_t n, size_t* need) { return dd_constants_json(b, n, need); }) << '\n';
    return 0;
}

int cmd_ekac(const Config& c) {
    if (c.xs.empty()) invalid("ekac needs --x");
    auto rule = make_rule(c);
    std::vector<dd_nu_mode> modes;
    if (c.mode == "both")
        modes = {DD_SMALL_OMEGA, DD_BIG_OMEGA};
    else
        modes = {parse_mode(c.mode)};
    std::vector<dd_ek_row> rows;
    for (double xd : c.xs) {
        const uint64_t x = as_count(xd, "x");
        dd_hist* raw = nullptr;
        check(dd_hist_collect(rule.get(), x, c.threads, &raw));
        std::unique_ptr<dd_hist, HistDeleter> hist(raw);
        for (auto m : modes) {
            dd_ek_row row{};
            check(dd_hist_ek_row(hist.get(), m, &row));
            rows.push_back(row);
        }
    }
    Sink sink(c.output);
    auto& os = sink.out();
    if (c.format == "json") {
        ordered_json cfg;
        cfg["subcommand"] = "ekac";
        cfg["rule"] = c.rule;
        if (c.rule == "dense") cfg["t"] = c.t;
        cfg["x"] = c.xs;
        cfg["mode"] = c.mode;
        const std::string text = cfg.dump();
        os << fetch_string([&](char* b, size_t n, size_t* need) {
            return dd_run_manifest(text.c_str(), rows.data(), rows.size(), b, n, need);
        }) << '\n';
        return 0;
    }
    os << dd_ek_csv_header() << '\n';
    for (const auto& r : rows)
        os << fetch_string([&](char* b, size_t n, size_t* need) { return dd_ek_csv_line(&r, b, n, need); }) << '\n';
    return 0;
}

int cmd_s0(const Config& c) {
    std::vector<double> phis = c.phis.empty() ? std::vector<double>{0.02, 0.05, 0.1} : c.phis;
    Sink sink(c.output);
    if (c.format == "csv") {
        sink.out() << fetch_string(
            [&](char* b, size_t n, size_t* need) { return dd_root_csv(phis.data(), phis.size(), b, n, need); });
        return 0;
    }
    Table t{{"phi", "re_s0", "im_s0", "re_Cz", "im_Cz", "residual"}, {}, {}};
    for (double phi : phis) {
        dd_root root{};
        dd_complex cz{};
        check(dd_find_s0(z_of(c, phi), &root));
        check(dd_residue_Cz(z_of(c, phi), &cz));
        t.rows.push_back({phi, root.s0.re, root.s0.im, cz.re, cz.im, root.residual});
    }
    t.print(sink.out(), c.format);
    return 0;
}

std::vector<double> sample_points(const Config& c, double lo, double hi) {
    if (!c.points.empty()) return c.points;
    if (!(c.grid > 0)) invalid("--grid must be positive");
    std::vector<double> pts;
    const long n = std::lround(std::floor((hi - lo) / c.grid + 1e-9));
    for (long i = 0; i <= n; ++i) pts.push_back(lo + i * c.grid);
    return pts;
}

int cmd_dz(const Config& c) {
    const double phi = c.phis.empty() ? 0.0 : c.phis.at(0);
    double v_max = c.v_max;
    for (double v : c.points) v_max = std::max(v_max, v);
    dd_dz* raw = nullptr;
    check(dd_dz_solve(z_of(c, phi), v_max, c.h, &raw));
    std::unique_ptr<dd_dz, DzDeleter> dz(raw);
    Table t{{"v", "re_dz", "im_dz"}, {}, {}};
    for (double v : sample_points(c, 0.0, v_max)) {
        dd_complex d{};
        check(dd_dz_eval(dz.get(), v, &d));
        t.rows.push_back({v, d.re, d.im});
    }
    Sink sink(c.output);
    t.print(sink.out(), c.format);
    return 0;
}

int cmd_omega(const Config& c) {
    const double phi = c.phis.empty() ? 0.0 : c.phis.at(0);
    double u_max = c.u_max;
    for (double u : c.points) u_max = std::max(u_max, u);
    dd_omega* raw = nullptr;
    check(dd_omega_solve(z_of(c, phi), u_max, c.h, &raw));
    std::unique_ptr<dd_omega, OmegaDeleter> omega(raw);
    Table t{{"u", "re_omega", "im_omega"}, {}, {}};
    for (double u : sample_points(c, 1.0, u_max)) {
        dd_complex w{};
        check(dd_omega_eval(omega.get(), u, &w));
        t.rows.push_back({u, w.re, w.im});
    }
    Sink sink(c.output);
    t.print(sink.out(), c.format);
    return 0;
}

int cmd_sifted(const Config& c) {
    if (c.xs.empty()) invalid("sifted needs --x");
    const dd_nu_mode mode = parse_mode(c.mode);
    std::vector<double> phis = c.phis.empty() ? std::vector<double>{0.0} : c.phis;
    Table t{{"x", "y", "phi", "mode", "re_exact", "im_exact", "re_main", "im_main", "rel_err"}, {}, {}};
    for (double x : c.xs)
        for (double phi : phis) {
            dd_complex exact{}, main_terms{};
            double rel = 0;
            check(dd_sifted_compare(x, c.y, phi, mode, &exact, &main_terms, &rel));
            t.text.push_back({num(x), num(c.y), num(phi), mode_name(mode)});
            t.rows.push_back({exact.re, exact.im, main_terms.re, main_terms.im, rel});
        }
    Sink sink(c.output);
    t.print(sink.out(), c.format);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"densediv: dense divisors, sifted sums and Erdos-Kac statistics"};
    app.set_help_flag("--help", "show help");
    app.require_subcommand(1);
    Config c;

    auto add_threads = [&](CLI::App* s) {
        s->add_option("--threads", c.threads, "worker threads")->envname("DENSEDIV_THREADS")->check(CLI::Range(1u, 1024u));
    };
    auto add_rule = [&](CLI::App* s) {
        s->add_option("--rule", c.rule, "dense or practical")->check(CLI::IsMember({"dense", "practical"}));
        s->add_option("--t", c.t, "density parameter for --rule dense");
    };
    auto add_format = [&](CLI::App* s) {
        s->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("-o,--output", c.output, "output file (stdout if absent)");
    };
    auto add_z = [&](CLI::App* s) {
        s->add_option("--z", c.z, "modulus of z");
        s->add_option("--phi", c.phis, "argument of z");
    };

    auto* en = app.add_subcommand("enumerate", "list members of B(x) in checkpoint format");
    add_rule(en);
    en->add_option("--x", c.xs, "upper bound")->required()->expected(1);
    en->add_option("-o,--output", c.output, "checkpoint file");
    en->add_flag("--resume", c.resume, "continue after the last intact line of --output");

    auto* co = app.add_subcommand("constants", "gamma, A, W, B, C, K, V as JSON");
    co->add_option("-o,--output", c.output, "output file");

    auto* ek = app.add_subcommand("ekac", "moments and KS distance of nu over B(x)");
    add_rule(ek);
    add_format(ek);
    add_threads(ek);
    ek->add_option("--x", c.xs, "one or more bounds")->required();
    ek->add_option("--mode", c.mode, "omega, Omega or both")->check(CLI::IsMember({"omega", "Omega", "both"}));

    auto* s0 = app.add_subcommand("s0", "root s0(e^{i phi}) and residue C_z");
    add_format(s0);
    s0->add_option("--phi", c.phis, "angles (default 0.02 0.05 0.1)");

    auto* dz = app.add_subcommand("dz", "density profile d_z(v)");
    add_format(dz);
    add_z(dz);
    dz->add_option("--v", c.points, "evaluation points (default: grid on [0, v_max])");
    dz->add_option("--v-max", c.v_max, "solve range");
    dz->add_option("--h", c.h, "step");
    dz->add_option("--grid", c.grid, "grid spacing for the default points");

    auto* om = app.add_subcommand("omega", "Buchstab-type omega_z(u)");
    add_format(om);
    add_z(om);
    om->add_option("--u", c.points, "evaluation points (default: grid on [1, u_max])");
    om->add_option("--u-max", c.u_max, "solve range");
    om->add_option("--h", c.h, "step");
    om->add_option("--grid", c.grid, "grid spacing for the default points");

    auto* si = app.add_subcommand("sifted", "sifted sum against its main terms");
    add_format(si);
    si->add_option("--x", c.xs, "bounds")->required();
    si->add_option("--y", c.y, "sieve limit");
    si->add_option("--phi", c.phis, "angles (default 0)");
    si->add_option("--mode", c.mode, "omega or Omega")->check(CLI::IsMember({"omega", "Omega"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*en) return cmd_enumerate(c);
        if (*co) return cmd_constants(c);
        if (*ek) return cmd_ekac(c);
        if (*s0) return cmd_s0(c);
        if (*dz) return cmd_dz(c);
        if (*om) return cmd_omega(c);
        if (*si) return cmd_sifted(c);
    } catch (const Failure& f) {
        std::cerr << "densediv: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "densediv: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
