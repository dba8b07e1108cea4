#pragma once

namespace lbdd {

// Routes spdlog to stderr at the level named by LATTICEBDD_LOG
// (trace, debug, info, warn, error, critical, off; default warn). Idempotent.
void init_logging();

}  // namespace lbdd
