import numpy as np
import pytest

from faultband import SimConfig, StftConfig, build_tensor, simulate, stft_spectrogram


@pytest.fixture(scope="session")
def short_signal():
    """Default-parameter record truncated to 3 s to keep tests fast."""
    return simulate(SimConfig(duration=3.0, rng_seed=0))


@pytest.fixture(scope="session")
def short_spectrogram(short_signal):
    return stft_spectrogram(short_signal, StftConfig())


@pytest.fixture(scope="session")
def short_tensor(short_signal):
    return build_tensor(short_signal, segment_count=6)


def random_spectrogram(rng, frames, bins):
    """Helper used by several suites: a valid positive spectrogram."""
    from faultband import Spectrogram

    mags = rng.uniform(0.1, 2.0, size=(frames, bins))
    return Spectrogram(
        magnitudes=mags,
        time_centers=np.arange(frames) * 0.01,
        freq_bins=np.arange(bins) * 100.0,
    )
