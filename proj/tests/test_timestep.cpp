#include <doctest.h>
TEST_SUITE("timestep") {}
