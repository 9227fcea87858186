# Copyright 2020 BULL SAS All rights reserved
