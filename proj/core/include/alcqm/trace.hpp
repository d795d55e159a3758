#ifndef ALCQM_TRACE_HPP_
#define ALCQM_TRACE_HPP_

#include <functional>
#include <string>

namespace alcqm {

// One line per graph mutation / search event:
//   LABEL x += C         EDGE x y += R
//   EQUATE x y -> rep    NEQ x y
//   RULE <tag> @ <focus> BRANCH n/k
//   CLOSE clash|cycle
// Lines are emitted in depth-first search order, so a fixed input and flag
// set always produces the same stream.
using TraceSink = std::function<void(const std::string&)>;

}  // namespace alcqm

#endif  // ALCQM_TRACE_HPP_
