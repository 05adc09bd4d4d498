#include <benchmark/benchmark.h>

// the distro benchmark_main archive carries LTO bytecode from another gcc
BENCHMARK_MAIN();
