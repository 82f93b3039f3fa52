from setuptools import find_packages, setup


setup(
    author="copresence developers",
    python_requires='>=3.10',
    description="Uncertainty-aware multi-weather co-presence estimation",
    include_package_data=True,
    keywords='copresence',
    name='copresence',
    packages=find_packages(include=['copresence', 'copresence.*']),
    version='0.1.0',
    install_requires=[
        'numpy', 'pandas', 'scikit-learn', 'wandb', 'kaleido',
        'plotly_express', 'pyyaml', 'ray', 'fasteners', 'pillow',
    ],
    entry_points={
        'console_scripts': ['copresence=copresence.main:main'],
    },
)
