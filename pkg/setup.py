from setuptools import find_packages, setup

setup(
    name='votediffuse',
    version='1.0.0',
    description='Voting diffusion simulator: pairwise opinion averaging over selected '
                'candidates, with trace replay and consensus verification',
    license='MIT',
    packages=find_packages(exclude=['tests']),
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.8',
        'scikit-learn>=1.2',
        'pydantic>=2.0'
    ],
    extras_require={
        'tests': [
            'hypothesis>=6.0'
        ]
    },
    entry_points={
        'console_scripts': [
            'votediffuse=votediffuse.cli:main'
        ]
    },
    zip_safe=False
)
