"""RIS-assisted mmWave TDMA downlink: sum-rate maximisation under per-UE AoI limits."""
from .bcd import ChannelProbe, LinkSolution, joint_optimize
from .beam_training import hierarchical_search, omni_codeword
from .channel import (ArrayConfig, ChannelRealization, LinkBudget, PathComponent, SystemGeometry,
                      draw_channel, effective_channel, pathloss_db, rate, snr, ula_steering,
                      upa_steering)
from .codebook import HierarchicalCodebook, beam_gain, build_codebook, children
from .config import ExperimentConfig
from .harness import monte_carlo_mean, run_baseline, run_realization, sweep
from .ris_search import ReflectionConfig, local_search, phase_set
from .scheduler import (RateProfile, ScheduleMatrix, aoi_step, average_aoi, brute_force_schedule,
                        design_schedule, validate_schedule)

__version__ = "0.1.0"
