// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "invit/experiment.hpp"
#include "invit/kernels.hpp"
#include "invit/parallel.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 1, kRuntime = 2 };

int guarded(const std::string& source, const std::function<void()>& fn) {
  try {
    fn();
    return kOk;
  } catch (const invit::ValidationError& e) {
    std::cerr << "invit: " << source << ": " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "invit: " << source << ": " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse-iteration ground-state experiments"};
  app.set_version_flag("--version", std::string(invit::tool_version()));
  app.require_subcommand(1);

  std::string run_target, validate_target, out_override;
  unsigned threads = 0;
  std::string simd;
  app.add_option("--threads", threads, "worker threads (overrides INVIT_THREADS)");
  app.add_option("--simd", simd, "kernel backend: scalar or avx2 (overrides INVIT_SIMD)")
      ->check(CLI::IsMember({"scalar", "avx2"}));

  auto* run = app.add_subcommand("run", "run a config file or a bundled config");
  run->add_option("config", run_target, "path or bundled name")->required();
  run->add_option("-o,--output", out_override, "primary CSV path");
  auto* validate = app.add_subcommand("validate", "parse and check a config without running");
  validate->add_option("config", validate_target, "path or bundled name")->required();
  auto* list = app.add_subcommand("list-bundled", "print the bundled config names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  if (threads > 0) invit::set_thread_count(threads);
  if (!simd.empty()) {
    const auto b = simd == "avx2" ? invit::kernels::Backend::Avx2 : invit::kernels::Backend::Scalar;
    if (!invit::kernels::set_backend(b)) {
      std::cerr << "invit: SIMD backend " << simd << " is not available on this machine\n";
      return kValidation;
    }
  }

  if (list->parsed()) {
    for (const auto& n : invit::list_bundled()) std::cout << n << "\n";
    return kOk;
  }
  if (validate->parsed()) {
    return guarded(validate_target, [&] {
      const auto cfg = invit::load_config(validate_target);
      std::cout << cfg.name << ": ok (" << invit::kind_name(cfg.kind) << ", hash "
                << invit::config_hash(cfg) << ")\n";
    });
  }
  return guarded(run_target, [&] {
    auto cfg = invit::load_config(run_target);
    if (!out_override.empty()) cfg.output = out_override;
    const auto t0 = std::chrono::steady_clock::now();
    auto res = invit::run_experiment(cfg);
    invit::write_result(cfg, res);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << cfg.name << " [" << invit::kind_name(cfg.kind) << "] hash "
              << invit::config_hash(cfg) << ", " << secs << " s\n"
              << res.summary;
    for (const auto& p : res.written) std::cout << "  wrote " << p.string() << "\n";
  });
}
