#pragma once

#include <cstddef>
#include <functional>

namespace modkam {

void set_thread_count(int n);
int thread_count();

// body(begin, end) over contiguous chunks of [0, n)
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace modkam
