import numpy as np
import pytest

from sadl import (
    ConfigError,
    DataError,
    Dataset,
    TrainConfig,
    format_config,
    make_dataset,
    parse_config_text,
    validate_config,
    validate_dataset,
)


def test_defaults_are_valid():
    validate_config(TrainConfig(dict_size=8))


def test_rho_below_one_rejected():
    with pytest.raises(ConfigError, match="rho must be >= 1"):
        validate_config(TrainConfig(dict_size=8, rho=0.5))


def test_paper_style_config_accepted():
    validate_config(TrainConfig(dict_size=570, lambda1=0.001, lambda2=9.0,
                                lambda3=3.0, lambda4=0.5, rho=1.01, max_iter=780))


def test_mu0_above_mu_max_rejected():
    with pytest.raises(ConfigError, match="mu0"):
        validate_config(TrainConfig(dict_size=8, mu0=10.0, mu_max=1.0))


@pytest.mark.parametrize("field,value", [
    ("lambda1", -1.0),
    ("lambda4", float("nan")),
    ("dict_size", 0),
    ("mu0", 0.0),
    ("max_iter", 0),
    ("tol", -1e-9),
    ("step_rule", "newton"),
    ("mode", "svm"),
])
def test_invalid_fields_rejected(field, value):
    with pytest.raises(ConfigError, match=field):
        validate_config(TrainConfig(dict_size=8).replace(**{field: value}))


def test_fixed_rule_requires_positive_etas():
    cfg = TrainConfig(dict_size=8, step_rule="fixed", eta_wq=0.0)
    with pytest.raises(ConfigError, match="eta_wq"):
        validate_config(cfg)


def test_config_round_trip_is_bit_exact():
    rng = np.random.default_rng(7)
    for _ in range(50):
        cfg = TrainConfig(
            dict_size=int(rng.integers(1, 2000)),
            lambda1=float(rng.uniform(0, 1)),
            lambda2=float(rng.uniform(0, 20)),
            lambda3=float(rng.uniform(0, 20)),
            lambda4=float(rng.uniform(0, 5)),
            mu0=float(rng.uniform(1e-6, 1.0)),
            rho=float(rng.uniform(1.0, 1.2)),
            mu_max=float(rng.uniform(1.0, 1e9)),
            max_iter=int(rng.integers(1, 2000)),
            tol=float(rng.uniform(0, 1e-3)),
            step_rule="fixed" if rng.random() < 0.5 else "spectral",
            eta_q=float(rng.uniform(1e-3, 10)),
            eta_wq=float(rng.uniform(1e-3, 10)),
            eta_wu=float(rng.uniform(1e-3, 10)),
            eta_qu=float(rng.uniform(1e-3, 10)),
            seed=int(rng.integers(0, 2**31)),
            mode="plain_adl" if rng.random() < 0.3 else "sadl",
        )
        assert parse_config_text(format_config(cfg)) == cfg


def test_config_parse_comments_and_spacing():
    cfg = parse_config_text(
        "# a comment\n"
        "dict_size = 12   # trailing comment\n"
        "\n"
        "lambda2=3.5\n"
    )
    assert cfg.dict_size == 12
    assert cfg.lambda2 == 3.5


def test_unknown_key_is_error():
    with pytest.raises(ConfigError, match="unknown config key: atoms"):
        parse_config_text("dict_size = 4\natoms = 7\n")


def test_duplicate_key_is_error():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text("dict_size = 4\ndict_size = 5\n")


def test_missing_dict_size_is_error():
    with pytest.raises(ConfigError, match="dict_size"):
        parse_config_text("lambda1 = 0.1\n")


def test_plain_mode_forces_zero_couplings():
    from sadl.core import effective_lambdas

    cfg = TrainConfig(dict_size=4, lambda2=9.0, lambda3=3.0, mode="plain_adl")
    assert effective_lambdas(cfg) == (0.0, 0.0)
    assert effective_lambdas(cfg.replace(mode="sadl")) == (9.0, 3.0)


def test_dataset_validation():
    data = make_dataset(np.eye(3), [0, 1, 0], 2)
    validate_dataset(data, require_all_classes=True)
    with pytest.raises(DataError, match="label out of range"):
        make_dataset(np.eye(3), [0, 1, 2], 2)
    with pytest.raises(DataError, match="NaN"):
        make_dataset(np.array([[np.nan, 0.0, 0.0], [0, 1, 0], [0, 0, 1]]),
                     [0, 1, 0], 2)
    with pytest.raises(DataError, match="class 1 has no samples"):
        validate_dataset(make_dataset(np.eye(3), [0, 0, 0], 2),
                         require_all_classes=True)
