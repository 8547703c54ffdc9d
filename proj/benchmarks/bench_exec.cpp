/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

int main() { return 0; }
