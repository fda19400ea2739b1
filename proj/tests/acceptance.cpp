// One line per acceptance criterion; exit status is nonzero if any fails.

#include <cstdio>
#include <map>
#include <string>

#include "porosity/identity_suites.hpp"

int main() {
  using porosity::CheckRecord;
  std::map<int, std::vector<CheckRecord>> by_id;
  for (auto& rec : porosity::suites::run_suite("all")) by_id[std::stoi(rec.id)].push_back(std::move(rec));

  int failed = 0;
  for (int id = 1; id <= 9; ++id) {
    const auto& recs = by_id[id];
    bool ok = !recs.empty();
    for (const auto& r : recs) ok = ok && r.passed;
    std::printf("criterion %d: %s (%zu checks)\n", id, ok ? "PASS" : "FAIL", recs.size());
    for (const auto& r : recs)
      std::printf("    [%s] %s: %s\n", r.passed ? "ok" : "fail", r.name.c_str(), r.detail.c_str());
    failed += ok ? 0 : 1;
  }
  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
