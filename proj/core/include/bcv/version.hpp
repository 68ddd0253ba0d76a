#pragma once

#define BCV_VERSION_MAJOR 0
#define BCV_VERSION_MINOR 1
#define BCV_VERSION_PATCH 0
#define BCV_VERSION_STRING "0.1.0"
