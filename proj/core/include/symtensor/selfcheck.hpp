#ifndef SYMTENSOR_SELFCHECK_HPP
#define SYMTENSOR_SELFCHECK_HPP

#include <string>
#include <vector>

namespace symtensor {

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

// Golden-value suite: the bipartition count table up to (5,5), the fixed
// (2,1,3) orbit/diagram matrices, the weight-matrix pattern, its unrolled
// form, and the identity/all-ones pair at k = l = 1.
std::vector<CheckResult> run_selfcheck();

}  // namespace symtensor

#endif
