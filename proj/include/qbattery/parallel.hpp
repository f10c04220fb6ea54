#pragma once

namespace qbattery {

/// Selects between the OpenMP kernel and the serial reference kernel.
enum class Execution { Serial, Parallel };

/// Number of OpenMP threads currently available (1 without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace qbattery
