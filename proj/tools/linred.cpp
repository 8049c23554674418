// linred command line: synth, verify, linearize.
// Only talks to the library through linred.h.

#include "linred/linred.h"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

bool read_file(const std::string& path, std::string& out)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

bool write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

// JSON string escaping, enough for messages and embedded documents.
std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (unsigned char c : s) {
        switch (c) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\t':
            out += "\\t";
            break;
        case '\r':
            out += "\\r";
            break;
        default:
            if (c < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += static_cast<char>(c);
            }
        }
    }
    return out + "\"";
}

struct Settings {
    std::string config_path;
    bool json = false;
    std::string output;
    std::string report;
    // key -> CLI11 option carrying it
    std::vector<std::pair<std::string, CLI::Option*>> keyed;
    std::vector<std::pair<std::string, std::string>> values;
};

// Usage failure before any command ran.
int usage_error(const Settings& s, const std::string& message)
{
    if (s.json)
        std::cout << "{\"status\": 1, \"message\": " << quote(message) << "}\n";
    else
        std::cerr << "linred: " << message << '\n';
    return LINRED_USAGE;
}

// Loads the config file, then every flag or env value on top of it.
linred_config* build_config(Settings& s)
{
    linred_config* cfg = linred_config_new();
    if (!s.config_path.empty()) {
        std::string text;
        if (!read_file(s.config_path, text)) {
            usage_error(s, "cannot read config file " + s.config_path);
            linred_config_free(cfg);
            return nullptr;
        }
        if (linred_config_load_json(cfg, text.c_str()) != LINRED_OK) {
            usage_error(s, s.config_path + ": " + linred_last_error());
            linred_config_free(cfg);
            return nullptr;
        }
    }
    for (std::size_t i = 0; i < s.keyed.size(); ++i) {
        if (s.keyed[i].second->empty())
            continue;
        if (linred_config_set(cfg, s.keyed[i].first.c_str(), s.values[i].second.c_str()) != LINRED_OK) {
            usage_error(s, linred_last_error());
            linred_config_free(cfg);
            return nullptr;
        }
    }
    return cfg;
}

int emit(const Settings& s, linred_result* res, const char* command)
{
    int status = linred_result_status(res);
    std::string payload = linred_result_json(res);
    std::string report = linred_result_report(res);
    std::string lp = linred_result_lp(res);
    std::string message = linred_result_message(res);

    bool ok = true;
    if (!s.output.empty() && status == LINRED_OK) {
        const std::string& body = std::string(command) == "linearize" ? lp : payload;
        ok = write_file(s.output, body + (body.empty() || body.back() == '\n' ? "" : "\n"));
    }
    if (!s.report.empty())
        ok = write_file(s.report, (report.empty() ? payload : report) + "\n") && ok;
    if (!ok) {
        linred_result_free(res);
        return usage_error(s, "cannot write output");
    }

    if (s.json) {
        std::cout << "{\"command\": " << quote(command) << ", \"status\": " << status
                  << ", \"message\": " << quote(message);
        if (!payload.empty())
            std::cout << ", \"result\": " << payload;
        if (!report.empty())
            std::cout << ", \"report\": " << report;
        if (!lp.empty())
            std::cout << ", \"lp\": " << quote(lp);
        std::cout << "}\n";
    } else {
        (status == LINRED_OK ? std::cout : std::cerr) << command << ": " << message << '\n';
        bool to_stdout = s.output.empty() || status == LINRED_REFUTED;
        if (to_stdout && std::string(command) == "linearize" && status == LINRED_OK)
            std::cout << lp;
        else if (to_stdout && !payload.empty() && status != LINRED_USAGE)
            std::cout << payload << '\n';
    }
    linred_result_free(res);
    return status;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Synthesize and verify linearization reductions; linearize models to MILP."};
    app.require_subcommand(1);
    app.fallthrough();

    Settings s;
    s.values = {
        {"solver_cmd", ""}, {"query_timeout_s", ""}, {"max_l", ""},   {"max_k", ""},
        {"schedule", ""},   {"seed", ""},            {"samples", ""}, {"coeff_bound", ""},
        {"resolution", ""}, {"random_points", ""},   {"iteration_cap", ""}, {"semantics", ""},
    };
    const char* flags[] = {"--solver-cmd", "--timeout", "--max-l", "--max-k", "--schedule", "--seed",
                           "--samples", "--coeff-bound", "--resolution", "--random-points",
                           "--iteration-cap", "--semantics"};
    const char* help[] = {"solver command line, e.g. \"z3 -in\"",
                          "per-query timeout in seconds",
                          "row ceiling",
                          "auxiliary binary ceiling",
                          "min-size or diagonal",
                          "random seed",
                          "initial random samples",
                          "bound on |coefficients| in candidate search",
                          "oracle grid resolution (rational)",
                          "oracle random points (verify --cross-check)",
                          "iterations per cell before giving up",
                          "canonical or literal"};
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        std::string env = std::string("LINRED_") + (flags[i] + 2);
        for (auto& ch : env)
            ch = ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        CLI::Option* opt = app.add_option(flags[i], s.values[i].second, help[i])->envname(env);
        s.keyed.emplace_back(s.values[i].first, opt);
    }
    app.add_option("--config", s.config_path, "JSON configuration file")
        ->envname("LINRED_CONFIG")
        ->check(CLI::ExistingFile);
    app.add_flag("--json", s.json, "print one JSON object on stdout and nothing else")
        ->envname("LINRED_JSON");
    app.add_option("-o,--output", s.output, "output file (reduction JSON or LP text)")
        ->envname("LINRED_OUTPUT");
    app.add_option("--report", s.report, "write the run or transform report here")
        ->envname("LINRED_REPORT");

    std::string pred_path, red_path, model_path;
    bool cross = false;

    auto* synth = app.add_subcommand("synth", "synthesize a reduction for a predicate");
    synth->add_option("predicate", pred_path, "predicate file")->required();

    auto* verify = app.add_subcommand("verify", "verify a reduction against a predicate");
    verify->add_option("predicate", pred_path, "predicate file")->required();
    verify->add_option("reduction", red_path, "reduction JSON file")->required();
    verify->add_flag("--cross-check", cross, "also run the brute-force oracle");

    auto* linearize = app.add_subcommand("linearize", "turn a model into MILP (LP format)");
    linearize->add_option("model", model_path, "model file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return LINRED_USAGE;
    }

    auto load = [&](const std::string& path, std::string& text) {
        if (read_file(path, text))
            return true;
        usage_error(s, "cannot read " + path);
        return false;
    };

    linred_config* cfg = build_config(s);
    if (!cfg)
        return LINRED_USAGE;

    int code = LINRED_USAGE;
    linred_result* res = nullptr;
    std::string a, b;
    if (synth->parsed()) {
        if (load(pred_path, a)) {
            linred_synth(cfg, a.c_str(), &res);
            code = emit(s, res, "synth");
        }
    } else if (verify->parsed()) {
        if (load(pred_path, a) && load(red_path, b)) {
            linred_verify(cfg, a.c_str(), b.c_str(), cross ? 1 : 0, &res);
            code = emit(s, res, "verify");
        }
    } else if (linearize->parsed()) {
        if (load(model_path, a)) {
            linred_linearize(cfg, a.c_str(), &res);
            code = emit(s, res, "linearize");
        }
    }
    linred_config_free(cfg);
    return code;
}
