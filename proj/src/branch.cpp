// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/branch.hpp"

namespace phyfea {
namespace {
thread_local BranchScope* active_scope = nullptr;
}  // namespace

BranchScope::BranchScope() : previous_(active_scope) { active_scope = this; }

BranchScope::~BranchScope() { active_scope = previous_; }

bool branch_recording() { return active_scope != nullptr; }

void note_branch(std::uint64_t value) {
  if (!active_scope) return;
  // FNV-1a over the eight bytes of value.
  for (int i = 0; i < 8; ++i) {
    active_scope->hash_ ^= (value >> (8 * i)) & 0xffu;
    active_scope->hash_ *= 1099511628211ull;
  }
}

}  // namespace phyfea
