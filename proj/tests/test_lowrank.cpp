#include <doctest.h>
TEST_SUITE("lowrank") {}
