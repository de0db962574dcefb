// Acceptance suite: runs every criterion at its pinned tolerance and prints
// one pass/fail line per criterion. Exit status 0 iff all criteria pass.

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "latwave/checks.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strncmp(argv[i], "--seed=", 7) == 0) seed = std::strtoull(argv[i] + 7, nullptr, 10);

  auto results = latwave::checks::run_checks("", seed, /*acceptance_only=*/true);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    std::printf("[%s] %-4s %-34s %6.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                r.name.c_str(), r.seconds, r.detail.c_str());
  }
  std::printf("%s: %zu criteria\n", all ? "ALL PASS" : "FAILURES PRESENT", results.size());
  return all ? 0 : 1;
}
