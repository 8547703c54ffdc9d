/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

namespace slosh {

/// Execution policy for batch kernels. The serial path is the reference
/// implementation; the openmp path must produce identical results.
enum class Exec {
    serial,
    openmp,
};

} // namespace slosh
