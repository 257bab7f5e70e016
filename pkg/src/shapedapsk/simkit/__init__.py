"""Transmitter chain, AWGN channel, BICM-ID receiver, BER campaigns and capacity."""
from .campaign import (
    CSV_FIELDS,
    BerRecord,
    ber_campaign,
    ebn0_at_ber,
    frame_rng,
    record_dict,
    records_from_csv,
    records_to_csv,
    simulate_frames,
)
from .capacity import CapacityRangeError, capacity_estimate, capacity_to_csv, solve_capacity_limit
from .receiver import ReceiveResult, bicm_id_receive
from .system import System, SystemConfig, awgn, transmit

__all__ = [
    "BerRecord", "CSV_FIELDS", "CapacityRangeError", "ReceiveResult", "System", "SystemConfig",
    "awgn", "ber_campaign", "bicm_id_receive", "capacity_estimate", "capacity_to_csv",
    "ebn0_at_ber", "frame_rng", "record_dict", "records_from_csv", "records_to_csv",
    "simulate_frames", "solve_capacity_limit", "transmit",
]
