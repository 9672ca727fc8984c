from setuptools import setup, find_packages

setup(
    name="latentqcd",
    version="0.1.0",
    packages=find_packages(exclude=["test", "test.*"]),
    package_data={"latentqcd.scenarios": ["presets.json"]},
    python_requires=">=3.10",
    install_requires=[
        "pydantic>=2",
        "pyyaml",
        "pandas",
        "numpy",
        "scipy",
        "tqdm",
        "typer[all]",
        "docstring_parser",
    ],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["latentqcd=latentqcd.cli:app"]},
)
