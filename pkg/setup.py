from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="noisy-tree-ising",
    version="0.1.0",
    author="David",
    author_email="noreply@example.com",
    description="Learn the equivalence class of a tree-structured Ising model from samples corrupted by unknown per-node bit flips",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/example/noisy-tree-ising",
    packages=find_packages(exclude=["tests*"]),
    include_package_data=True,
    package_data={"noisy_tree_ising": ["presets/*.cfg"]},
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
    ],
    keywords="ising graphical-model structure-learning tree noise chow-liu",
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "networkx>=3.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "pytest-cov>=4.0.0",
            "hypothesis>=6.80.0",
            "black>=23.0.0",
            "isort>=5.12.0",
            "mypy>=1.0.0",
            "flake8>=6.0.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "noisy-tree-ising=noisy_tree_ising.cli:main",
        ],
    },
    project_urls={
        "Bug Reports": "https://github.com/example/noisy-tree-ising/issues",
        "Source": "https://github.com/example/noisy-tree-ising",
    },
)
