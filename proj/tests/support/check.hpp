#pragma once

// doctest with a qualified stringify, so tsm::toString stays out of ADL.
#define DOCTEST_STRINGIFY(...) doctest::toString(__VA_ARGS__)
#include <doctest.h>
