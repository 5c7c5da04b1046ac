#pragma once

#define EVTWALK_VERSION "0.1.0"
