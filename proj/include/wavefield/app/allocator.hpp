#pragma once

namespace wf::app {

/// Keeps freed tensor buffers in the heap instead of returning them to the
/// OS, so the large per-iteration allocations of training stop page-faulting.
/// No-op outside glibc. Call once, early in main.
void retain_freed_memory();

}  // namespace wf::app
