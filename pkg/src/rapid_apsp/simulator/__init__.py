"""
存内计算（PCM）周期/能耗模型
"""

from rapid_apsp.simulator.cost_model import (
    BitSerialOp,
    TileCost,
    bit_serial_cost,
    calibrate_update_probability,
    comparator_tree_cycles,
    permutation_unit_cost,
    simulate_fw_tile,
    simulate_mp_tile,
    transfer_seconds,
)
from rapid_apsp.simulator.dataflow import makespan, simulate_dataflow, stage_tier, static_power_w
from rapid_apsp.simulator.device import DeviceConfig, load_device_config, resolve_device_config
from rapid_apsp.simulator.report import merge_reports, report_json, report_text, sweep_frame, write_table

__all__ = [
    "BitSerialOp",
    "DeviceConfig",
    "TileCost",
    "bit_serial_cost",
    "calibrate_update_probability",
    "comparator_tree_cycles",
    "load_device_config",
    "makespan",
    "merge_reports",
    "permutation_unit_cost",
    "report_json",
    "report_text",
    "resolve_device_config",
    "simulate_dataflow",
    "simulate_fw_tile",
    "simulate_mp_tile",
    "stage_tier",
    "static_power_w",
    "sweep_frame",
    "transfer_seconds",
    "write_table",
]
