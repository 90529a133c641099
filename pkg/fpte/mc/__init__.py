from fpte.mc.compare import ComparisonReport, compare_stats, passage_time_ks
from fpte.mc.oscillator import simulate_duffing_fpt, verlet_energy_trace
from fpte.mc.simulate import FptStats, default_dt, dump_passage_times, simulate_fpt_1d

__all__ = [
    "ComparisonReport",
    "FptStats",
    "compare_stats",
    "default_dt",
    "dump_passage_times",
    "passage_time_ks",
    "simulate_duffing_fpt",
    "simulate_fpt_1d",
    "verlet_energy_trace",
]
