"""Wi-Wi: two-way carrier-phase range-variation monitoring, in simulation.

Two sites exchange 802.15.4 O-QPSK packets, measure the carrier phase of
every packet at both the local and the remote receiver, and combine the
phases two-way to split the result into a clock-difference term and a
propagation-delay term. The propagation term tracks antenna distance
variation at the millimeter (picosecond) level.
"""

from wiwi.channel import ChannelConfig, MotionProfile, apply_channel, motion_position, propagation_delay
from wiwi.clock import ClockNoiseConfig, ClockState, advance, lo_phase, read_time
from wiwi.phy import IqFrame, PacketMeasurement, PhyConfig, demodulate_packet, modulate, packet_phase
from wiwi.twcp import TwcpSample, TwcpSeries, combine, process_stream, unwrap_series
from wiwi.sim import ScenarioConfig, SimOutput, run, schedule

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig",
    "ClockNoiseConfig",
    "ClockState",
    "IqFrame",
    "MotionProfile",
    "PacketMeasurement",
    "PhyConfig",
    "ScenarioConfig",
    "SimOutput",
    "TwcpSample",
    "TwcpSeries",
    "advance",
    "apply_channel",
    "combine",
    "demodulate_packet",
    "lo_phase",
    "modulate",
    "motion_position",
    "packet_phase",
    "process_stream",
    "propagation_delay",
    "read_time",
    "run",
    "schedule",
    "unwrap_series",
]
