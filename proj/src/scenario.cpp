namespace optopulse {}
