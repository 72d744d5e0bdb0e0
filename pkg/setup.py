from setuptools import setup, find_packages

setup(
    name="oscsignal",
    version="0.1",
    packages=find_packages(exclude=["Tests", "examples", "examples.*"]),
    install_requires=[
        "numpy>=1.26.4",
        "pandas>=2.2.3",
        "plotly>=5.24.1",
    ],
    entry_points={
        "console_scripts": [
            "oscsignal=oscsignal.main:main",
        ],
    },
)
