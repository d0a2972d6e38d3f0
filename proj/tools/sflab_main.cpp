// Command-line front end: sflab <subcommand> [--config FILE] [--key value]...

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sflab/config.hpp"
#include "sflab/errors.hpp"
#include "sflab/run.hpp"

namespace {

void print_usage(std::ostream& os) {
    os << "usage: sflab <subcommand> [--config FILE] [--key value ...]\n"
       << "       sflab replay <manifest.json> [--out DIR]\n\n"
       << "subcommands:\n"
       << "  spectrum       windowed boosted Girardeau spectra (CSV)\n"
       << "  umklapp        umklapp ladder table and Prop.-1 residuals\n"
       << "  ness           lambda_j = -2*pi*rho*v*j via 1/L extrapolation\n"
       << "  metastability  Definition-3 verdicts over a velocity grid\n"
       << "  landau         critical velocity from dispersion curves\n"
       << "  sound          sound speed both routes + free-boson contrast\n"
       << "  kms            KMS residuals, boosted witness, Bloch currents\n"
       << "  meissner       self-consistent field profile and penetration depth\n"
       << "  extrapolate    generic a + b/L fit of an (L,value) CSV\n\n"
       << "Flags map onto config keys (sflab ness --rho 1 --v 1 --j 3).\n"
       << "Output directory: --out, else $SFLAB_OUTDIR, else the working directory.\n";
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        print_usage(args.empty() ? std::cerr : std::cout);
        return args.empty() ? sflab::cli::kExitConfig : 0;
    }

    const std::string subcommand = args[0];

    if (subcommand == "replay") {
        if (args.size() < 2) {
            std::cerr << "config error: replay needs a manifest path\n";
            return sflab::cli::kExitConfig;
        }
        std::string out_override;
        for (std::size_t i = 2; i + 1 < args.size(); i += 2)
            if (args[i] == "--out") out_override = args[i + 1];
        return sflab::cli::replay_manifest(args[1], out_override, std::cerr);
    }

    sflab::cli::Config raw;
    try {
        for (std::size_t i = 1; i < args.size(); ++i) {
            const std::string& arg = args[i];
            if (arg.rfind("--", 0) != 0)
                throw sflab::ConfigError("expected --key, got '" + arg + "'");
            if (i + 1 >= args.size())
                throw sflab::ConfigError("flag '" + arg + "' needs a value");
            const std::string key = arg.substr(2);
            const std::string value = args[++i];
            if (key == "config") {
                std::ifstream file(value);
                if (!file)
                    throw sflab::ConfigError("cannot read config file '" + value + "'");
                std::stringstream buf;
                buf << file.rdbuf();
                const sflab::cli::Config from_file =
                    sflab::cli::parse_config_text(buf.str());
                for (const auto& [k, v] : from_file.values)
                    if (!raw.has(k)) raw.values[k] = v;   // flags win over the file
            } else {
                raw.values[key] = value;
            }
        }
    } catch (const sflab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return sflab::cli::kExitConfig;
    }

    return sflab::cli::run_subcommand(subcommand, raw, std::cerr);
}
