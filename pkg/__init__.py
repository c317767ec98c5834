# Stylized Empirical Facts toolkit
