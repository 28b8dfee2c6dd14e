from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    series_max_terms: int = 64
    series_rel_stop: float = 1e-16
    series_arg_bound: float = 30.0

    grid_x_min: float = 0.0
    grid_x_max: float = 1.0
    grid_nx: int = 201
    grid_t_min: float = 0.0
    grid_t_max: float = 1.0
    grid_nt: int = 401

    tol_exact_time: float = 1e-6
    tol_fd: float = 1e-2

    # relative to max |u| over the grid
    zero_mask_threshold: float = 1e-6
    # fraction of the time interval next to t=0 dropped from fd statistics of fractional operators
    fd_startup_layer: float = 0.1

    log_level: str = "WARNING"
    log_json: bool = False

    def tolerance_for(self, mode: str) -> float:
        return self.tol_exact_time if mode == "exact-time" else self.tol_fd


settings = Settings()  # type: ignore[call-arg]
