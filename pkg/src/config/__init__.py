import os.path as osp
import os
import yaml
from dotenv import load_dotenv

here = osp.dirname(osp.abspath(__file__))

DEFAULT_SEED = 20240601
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def update_dict(target_dict, new_dict, validate_item=None):
    for key, value in new_dict.items():
        if validate_item:
            validate_item(key, value)
        if key not in target_dict:
            continue
        if isinstance(target_dict[key], dict) and isinstance(value, dict):
            update_dict(target_dict[key], value, validate_item=validate_item)
        else:
            target_dict[key] = value


def get_default_config():
    config_file = osp.join(here, "setting.yaml")
    with open(config_file) as f:
        config = yaml.safe_load(f)
    return config


def validate_config_item(key, value):
    if key == "seed" and value is not None and (not isinstance(value, int) or value < 0):
        raise ValueError(
            "Unexpected value for config key 'seed': {}".format(value)
        )
    if key == "max_degree" and (not isinstance(value, int) or value < 0):
        raise ValueError(
            "Unexpected value for config key 'max_degree': {}".format(value)
        )
    if key in ("workers", "random_sections", "jacobi_random_triples") and (
        not isinstance(value, int) or value < 1
    ):
        raise ValueError(
            "Unexpected value for config key '{}': {}".format(key, value)
        )
    if key == "level" and str(value).upper() not in LOG_LEVELS:
        raise ValueError(
            "Unexpected value for config key 'level': {}".format(value)
        )


def _env_int(name):
    value = os.environ.get(name)
    if value is None or value.strip() == "":
        return None
    try:
        return int(value)
    except ValueError:
        raise ValueError("Environment variable {} must be an integer: {}".format(name, value))


def get_config(config_file_or_yaml=None, config_from_args=None):
    # 1. default config
    config = get_default_config()

    # 2. specified as file or yaml
    if config_file_or_yaml is not None:
        config_from_yaml = yaml.safe_load(config_file_or_yaml)
        if not isinstance(config_from_yaml, dict):
            with open(config_from_yaml) as f:
                config_from_yaml = yaml.safe_load(f)
        update_dict(config, config_from_yaml, validate_item=validate_config_item)

    # 3. command line argument or specified config file
    if config_from_args is not None:
        update_dict(config, config_from_args, validate_item=validate_config_item)

    # 4. Environment variables fill what is still unset
    load_dotenv()
    env_seed = _env_int("COURANT_SEED")
    if config["sampling"].get("seed") is None:
        config["sampling"]["seed"] = env_seed if env_seed is not None else DEFAULT_SEED
    validate_config_item("seed", config["sampling"]["seed"])

    env_workers = _env_int("COURANT_WORKERS")
    if env_workers is not None and not (config_from_args or {}).get("checks", {}).get("workers"):
        validate_config_item("workers", env_workers)
        config["checks"]["workers"] = env_workers

    env_level = os.environ.get("COURANT_LOG_LEVEL")
    if env_level and not (config_from_args or {}).get("logging", {}).get("level"):
        validate_config_item("level", env_level)
        config["logging"]["level"] = env_level.upper()

    return config


# Global configuration
CONFIG = get_config()
