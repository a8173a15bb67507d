#pragma once

#include <gtest/gtest.h>

#include "churnfuse/error.hpp"

// Asserts that `stmt` throws churnfuse::Error carrying `expected`.
#define EXPECT_CODE(stmt, expected)                                                    \
  do {                                                                                 \
    try {                                                                              \
      stmt;                                                                            \
      ADD_FAILURE() << #stmt " did not throw";                                         \
    } catch (const ::churnfuse::Error& e) {                                            \
      EXPECT_EQ(e.code(), expected) << e.what();                                       \
    }                                                                                  \
  } while (0)
