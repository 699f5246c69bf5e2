from setuptools import setup, find_packages

setup(
    name="rdlab",
    version="0.1.0",
    description="Numerical laboratory for dissipative reaction-diffusion systems and their global-existence estimates",
    author="Arthur B",
    packages=find_packages(exclude=["tests", "tests.*"]),
    include_package_data=True,
    python_requires=">=3.8",
    install_requires=[
        # Numerical core
        "numpy>=1.22.0",  # Fields, networks, diagnostics
        "scipy>=1.9.0",  # Cosine transforms, stacked expm, ODE oracle, quadrature

        # Console output
        "tqdm>=4.60.0",  # Progress bars for sweeps and families
        "colorama>=0.4.4",  # Colored reports and log levels
    ],
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "hypothesis>=6.0.0",
            "black>=22.0.0",
            "flake8>=4.0.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "rdlab=rdlab.lab:main",
        ],
    },
)
