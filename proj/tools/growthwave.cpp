#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "growthwave/cli.hpp"

int main(int argc, char** argv) {
  namespace gc = growthwave::cli;
  CLI::App app{"growthwave: harmonic growth spaces, wavelet characterization and oscillation diagnostics"};
  std::string command;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  app.add_option("command", command, "plan | synth | extend | characterize | pairing | osc | seq | selftest")
      ->required()
      ->check(CLI::IsMember(gc::commands()));
  app.add_option("--config", config, "JSON run configuration")->required();
  app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    nlohmann::json d{{"error", "usage"}, {"exit_code", 1}, {"message", e.what()}};
    std::cerr << d.dump() << '\n';
    return 1;
  }

  std::optional<std::filesystem::path> out_dir;
  if (out) out_dir = *out;
  const auto result = gc::run_from_file(command, config, seed, out_dir, std::cerr);
  for (const auto& p : result.artifacts) std::cout << p.string() << '\n';
  return result.exit_code;
}
