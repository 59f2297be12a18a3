#pragma once

#include <mutex>

namespace segregation::detail {

// FFTW planning is not thread safe; every plan creation and destruction holds this lock.
std::mutex& fftw_planner_mutex();

} // namespace segregation::detail
