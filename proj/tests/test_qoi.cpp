#include <doctest.h>
TEST_SUITE("qoi") {}
