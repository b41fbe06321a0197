"""World geometry: UAV deployment and Gauss-Markov ground-user mobility."""

import math

import numpy as np
from loguru import logger

from .data_model import Position3, ScenarioConfig, Side, SwarmState, UserState
from .errors import PlacementError
from .rng import RngStream

MAX_PLACEMENT_ATTEMPTS = 10_000


def _wrap_angle(angle: float) -> float:
    return math.atan2(math.sin(angle), math.cos(angle))


def side_rectangle(cfg: ScenarioConfig, side: Side) -> list[float]:
    return cfg.mobility.rect_k if side is Side.SAME else cfg.mobility.rect_j


def place_uavs(cfg: ScenarioConfig, rng: RngStream) -> np.ndarray:
    """Rejection-sample UAV positions in the flight box with pairwise separation."""
    region = cfg.region
    low = np.array([region.l_min, region.l_min, region.h_min])
    high = np.array([region.l_max, region.l_max, region.h_max])
    positions = np.empty((region.n_uavs, 3))

    for m in range(region.n_uavs):
        for _ in range(MAX_PLACEMENT_ATTEMPTS):
            candidate = rng.init.uniform(low, high)
            if m == 0:
                break
            gaps = np.linalg.norm(positions[:m] - candidate, axis=1)
            if np.all(gaps >= region.d_min):
                break
        else:
            logger.error(
                f"Could not place UAV {m} after {MAX_PLACEMENT_ATTEMPTS} attempts"
            )
            raise PlacementError(
                f"region.d_min: cannot place UAV {m} of {region.n_uavs} with minimum "
                f"separation {region.d_min} m after {MAX_PLACEMENT_ATTEMPTS} attempts"
            )
        positions[m] = candidate
    return positions


def place_users(cfg: ScenarioConfig, rng: RngStream) -> list[UserState]:
    """Users uniform in their side rectangle, heading towards a random mean direction."""
    users = []
    for side, count in ((Side.SAME, cfg.mobility.n_users_k), (Side.OPPOSITE, cfg.mobility.n_users_j)):
        x_min, x_max, y_min, y_max = side_rectangle(cfg, side)
        for _ in range(count):
            x = rng.init.uniform(x_min, x_max)
            y = rng.init.uniform(y_min, y_max)
            heading = rng.init.uniform(-math.pi, math.pi)
            speed = cfg.mobility.mean_speed
            users.append(
                UserState(
                    position=Position3(x=x, y=y, z=0.0),
                    velocity=(speed * math.cos(heading), speed * math.sin(heading)),
                    side=side,
                    mean_heading=heading,
                )
            )
    return users


def init_deployment(cfg: ScenarioConfig, rng: RngStream) -> tuple[SwarmState, list[UserState]]:
    """
    Draw a fresh deployment.

    Args:
        cfg: Validated scenario configuration
        rng: Random streams; only the ``init`` substream is consumed

    Returns:
        The swarm (all excitations 1, at rest) and the users, side K first
    """
    positions = place_uavs(cfg, rng)
    users = place_users(cfg, rng)
    logger.debug(
        f"Deployed {cfg.region.n_uavs} UAVs and {len(users)} users "
        f"(centroid {np.round(positions.mean(axis=0), 2).tolist()})"
    )
    return SwarmState.from_positions(positions), users


def gmrmm_step(user: UserState, cfg: ScenarioConfig, rng: RngStream) -> UserState:
    """Advance one user by one slot of Gauss-Markov movement.

    Speed and heading are each an AR(1) process pulled towards the configured
    mean speed and the user's own mean heading. The user is clipped to its
    rectangle; the outward velocity component and the mean heading are
    mirrored at the wall.
    """
    mob = cfg.mobility
    mu = mob.memory
    scale = math.sqrt(max(0.0, 1.0 - mu * mu))
    speed_noise, heading_noise = rng.mobility.standard_normal(2)

    vx, vy = user.velocity
    speed = math.hypot(vx, vy)
    heading = math.atan2(vy, vx) if speed > 0.0 else user.mean_heading

    new_speed = mu * speed + (1.0 - mu) * mob.mean_speed + scale * mob.speed_std * speed_noise
    new_speed = max(new_speed, 0.0)
    new_heading = (
        heading
        + (1.0 - mu) * _wrap_angle(user.mean_heading - heading)
        + scale * mob.heading_std * heading_noise
    )
    vx = new_speed * math.cos(new_heading)
    vy = new_speed * math.sin(new_heading)

    x = user.position.x + vx * mob.slot_duration
    y = user.position.y + vy * mob.slot_duration
    mean_heading = user.mean_heading
    x_min, x_max, y_min, y_max = side_rectangle(cfg, user.side)

    if x < x_min or x > x_max:
        x = min(max(x, x_min), x_max)
        vx = -vx
        mean_heading = math.pi - mean_heading
    if y < y_min or y > y_max:
        y = min(max(y, y_min), y_max)
        vy = -vy
        mean_heading = -mean_heading

    return UserState(
        position=Position3(x=x, y=y, z=0.0),
        velocity=(vx, vy),
        side=user.side,
        mean_heading=_wrap_angle(mean_heading),
    )


def in_region(positions: np.ndarray, cfg: ScenarioConfig) -> np.ndarray:
    """Closed-box membership per UAV."""
    r = cfg.region
    xy_ok = np.all((positions[:, :2] >= r.l_min) & (positions[:, :2] <= r.l_max), axis=1)
    z_ok = (positions[:, 2] >= r.h_min) & (positions[:, 2] <= r.h_max)
    return xy_ok & z_ok
