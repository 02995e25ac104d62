#pragma once

#include <gtest/gtest.h>

#include <functional>

#include "fmatch/error.hpp"

/// Kind of the fmatch::Error thrown by f; records a failure if none is.
inline fmatch::ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const fmatch::Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no fmatch::Error thrown";
    return fmatch::ErrorKind::InvalidArgument;
}
