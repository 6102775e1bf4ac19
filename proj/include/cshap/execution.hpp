#pragma once

namespace cshap {

// Selects between the OpenMP kernels and their serial reference versions.
// Both produce bit-identical results; reductions always run in a fixed order.
enum class Execution { Serial, Parallel };

} // namespace cshap
