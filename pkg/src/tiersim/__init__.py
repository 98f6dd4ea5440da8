"""Trace-driven simulator of hybrid DRAM+NVM main memory with a
hypervisor-style dynamic page-remapping optimizer."""

from .engine import RunConfig, RunResult, Simulation, run
from .mapping import PageMapping, create_mapping, swap_pages
from .memmodel import (CacheConfig, DeviceTier, LlcFilter, MissRecord,
                       TierDemand, epoch_time, llc_filter, load_tier_preset)
from .monitor import PageHeat
from .optimizer import PolicyConfig, SwapPlan, plan_swaps, static_oracle
from .workloads import AccessEvent, Trace, WorkloadSpec, generate, load_trace, save_trace

__all__ = [
    "AccessEvent", "CacheConfig", "DeviceTier", "LlcFilter", "MissRecord",
    "PageHeat", "PageMapping", "PolicyConfig", "RunConfig", "RunResult",
    "Simulation", "SwapPlan", "TierDemand", "Trace", "WorkloadSpec",
    "create_mapping", "epoch_time", "generate", "llc_filter", "load_tier_preset",
    "load_trace", "plan_swaps", "run", "save_trace", "static_oracle", "swap_pages",
]
